"""Fine-tune a frame-level boundary regressor and export score files
consumable by the prosobound detection pipeline."""

__version__ = "0.1.0"
