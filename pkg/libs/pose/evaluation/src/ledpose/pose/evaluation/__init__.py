"""ledpose evaluation - pose metrics, LED and detection AUC, baselines and multi-robot matching."""

from ledpose.pose.evaluation.auc import auc_binary
from ledpose.pose.evaluation.metrics import (
    GAMMA_ANGLE,
    GAMMA_POSITION,
    evaluate,
    evaluate_detection,
    evaluate_predictor,
    image_batches,
    led_auc,
    summarize,
)
from ledpose.pose.evaluation.multi import evaluate_multi_robot, match_by_pixel
from ledpose.pose.evaluation.predictors import (
    FramePrediction,
    MeanPredictor,
    NetworkPredictor,
    Predictor,
    mean_predictor,
    prediction_from_estimate,
)
from ledpose.pose.evaluation.report import REPORT_NAME, DetectionReport, MetricsReport, MultiRobotReport
from ledpose.pose.evaluation.truth import FrameTruth, Subset, frame_truth, frame_truths, scene_geometry

__all__ = [
    # reports
    "REPORT_NAME",
    "DetectionReport",
    "MetricsReport",
    "MultiRobotReport",
    # metrics
    "GAMMA_ANGLE",
    "GAMMA_POSITION",
    "auc_binary",
    "evaluate",
    "evaluate_detection",
    "evaluate_predictor",
    "image_batches",
    "led_auc",
    "summarize",
    # ground truth
    "FrameTruth",
    "Subset",
    "frame_truth",
    "frame_truths",
    "scene_geometry",
    # predictors
    "FramePrediction",
    "MeanPredictor",
    "NetworkPredictor",
    "Predictor",
    "mean_predictor",
    "prediction_from_estimate",
    # multi-robot
    "evaluate_multi_robot",
    "match_by_pixel",
]
