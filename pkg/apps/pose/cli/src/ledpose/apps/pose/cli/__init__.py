"""ledpose CLI - command line for the LED-supervised pose pipeline."""

__version__ = "0.1.0"
