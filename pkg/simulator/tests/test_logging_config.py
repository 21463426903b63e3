import json
import logging

import structlog

from core.logging_config import initialize_logging, reset_logging


def test_initialize_logging_only_once():
    reset_logging()
    try:
        assert initialize_logging(level="WARNING") is True
        assert initialize_logging(level="DEBUG") is False
    finally:
        reset_logging()


def test_json_rendering(caplog):
    reset_logging()
    caplog.set_level(logging.INFO)
    try:
        initialize_logging(level="INFO", fmt="json")
        structlog.get_logger("sim.test").info("monte carlo finished", nu=0.1)
        record = json.loads(caplog.records[-1].getMessage())
        assert record["event"] == "monte carlo finished"
        assert record["nu"] == 0.1 and record["level"] == "info"
        assert record["logger"] == "sim.test"
    finally:
        reset_logging()
