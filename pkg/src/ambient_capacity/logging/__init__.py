from .logger import bootstrap_logger

__all__ = ["bootstrap_logger"]
