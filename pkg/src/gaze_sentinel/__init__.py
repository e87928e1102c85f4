"""gaze-sentinel: detect robot failures from participant gaze dynamics.

The package covers the full pipeline: AOI hit-testing and fixation
debouncing, gaze-metric extraction, class-balanced classifier training,
participant-level cross-validation, truncated-prefix and sliding-window
evaluation, and a calibrated synthetic-session generator.
"""

__version__ = "0.1.0"
