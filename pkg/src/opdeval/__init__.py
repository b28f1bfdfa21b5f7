"""Evaluation and kinematics toolkit for openable part detection."""

from .artic import (
    ArticulatedObject,
    MotionSpec,
    MotionType,
    OpenablePart,
    PartLabel,
    apply_motion,
    motion_state_schedule,
    motion_to_frame,
    object_diagonal,
)
from .baselines import FreqStats, MostFreq, RandMot, mostfreq_fit
from .data import (
    Detection,
    FrameGT,
    GTDataset,
    PredFrame,
    frame_filter,
    load_ground_truth,
    load_predictions,
    save_ground_truth,
    save_predictions,
    write_report,
)
from .geom import RigidTransform, SemanticOBB
from .metrics import EvalConfig, MetricsReport, OPDEvaluator, evaluate

__version__ = "0.1.0"
