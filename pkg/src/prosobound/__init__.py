"""Prosodic phrase boundary detection toolkit.

Turns per-frame boundary scores into word-aligned boundary predictions and
evaluates them: fuzzy reference label curves, overlapped-chunk stitching,
multi-seed averaging, thresholded peak picking with non-maximum
suppression, boundary classification and segmentation metrics, and
AND/OR fusion of predictor outputs.
"""

__version__ = "0.1.0"
