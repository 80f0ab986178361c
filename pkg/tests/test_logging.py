import logging

from gentlekit.core.logging import PACKAGE_LOGGER, get_logger, resolve_level, setup_logging


def test_resolve_level():
    assert resolve_level("debug") == logging.DEBUG
    assert resolve_level("Warning") == logging.WARNING
    assert resolve_level("chatty") is None


def test_setup_is_idempotent(capsys):
    setup_logging("info")
    logger = setup_logging("info")
    assert logger.name == PACKAGE_LOGGER
    assert len(logger.handlers) == 1
    get_logger("gentlekit.algebra.quiver").info("parsed d6")
    err = capsys.readouterr().err
    assert err.count("parsed d6") == 1
    assert "gentlekit.algebra.quiver - INFO" in err


def test_unknown_level_falls_back(capsys):
    logger = setup_logging("chatty")
    assert logger.level == logging.WARNING
    captured = capsys.readouterr()
    assert "Unknown log level 'chatty'" in captured.err
    assert captured.out == ""
