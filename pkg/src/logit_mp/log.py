"""
Logging utilities for logit-mp.
"""

import json
import logging
from typing import Any, Dict

logger = logging.getLogger("logit_mp")


class Log:
    """Logging utilities for emitting messages and structured events"""

    @staticmethod
    def info(message: str):
        """Logs an informational message"""
        logger.info(message)

    @staticmethod
    def warning(message: str):
        """Logs a warning message"""
        logger.warning(message)

    @staticmethod
    def error(message: str):
        """Logs an error message"""
        logger.error(message)

    @staticmethod
    def debug(message: str):
        """Logs a debug message"""
        logger.debug(message)

    @staticmethod
    def event(event_type: str, data: Dict[str, Any]):
        """
        Logs a structured event as a single EVENT_JSON line at debug level.
        """
        event_data = {
            "standard": "logit-mp",
            "version": "1.0.0",
            "event": event_type,
            "data": data,
        }
        logger.debug(f"EVENT_JSON:{json.dumps(event_data, default=str)}")
