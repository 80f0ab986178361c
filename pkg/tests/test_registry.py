import pytest
from pydantic import ValidationError as PydanticValidationError

from gentlekit.commands.registry import CommandRegistry
from gentlekit.exceptions import EXIT_INPUT_ERROR, EXIT_OK, EXIT_VERIFICATION_FAILED, InputError
from gentlekit.schemas import AnalysisRequest, Command, Report, RunInfo, SuiteName


def _request(command=Command.SUITE):
    return AnalysisRequest(command=command, suite=SuiteName.BLOCKS)


def _report(verified=True):
    run = RunInfo(field="QQ", characteristic=0, trials=1, seed=0, max_letters=0)
    return Report(command="suite", run=run, verified=verified)


def test_unknown_command():
    result = CommandRegistry().dispatch(_request())
    assert not result.success
    assert result.exit_code == EXIT_INPUT_ERROR
    assert result.to_dict()["error"]["type"] == "not_found"


def test_handler_outcomes():
    registry = CommandRegistry()

    @registry.command("suite")
    def run(_):
        return _report()

    result = registry.dispatch(_request())
    assert result.success and result.exit_code == EXIT_OK
    assert result.to_dict()["data"]["command"] == "suite"

    registry.register_command("suite", lambda _: _report(verified=False))
    assert registry.dispatch(_request()).exit_code == EXIT_VERIFICATION_FAILED


def test_handler_errors():
    registry = CommandRegistry()

    def bad_input(_):
        raise InputError("no such algebra")

    def crash(_):
        raise RuntimeError("boom")

    registry.register_command("suite", bad_input)
    result = registry.dispatch(_request())
    assert result.exit_code == EXIT_INPUT_ERROR
    document = result.to_dict()
    assert document["success"] is False
    assert document["error"] == {"type": "bad_request", "message": "no such algebra"}
    assert document["meta"]["exit_code"] == EXIT_INPUT_ERROR

    registry.register_command("suite", crash)
    result = registry.dispatch(_request())
    assert result.exit_code == EXIT_VERIFICATION_FAILED
    assert result.to_dict()["error"]["type"] == "internal_error"


def test_request_rejects_composite_characteristic():
    with pytest.raises(PydanticValidationError, match="0 or a prime"):
        AnalysisRequest(command=Command.ANALYZE, input_path="d6.bq", characteristic=4)


def test_request_needs_its_inputs():
    with pytest.raises(PydanticValidationError, match="--suite"):
        AnalysisRequest(command=Command.SUITE)
    with pytest.raises(PydanticValidationError, match="input file"):
        AnalysisRequest(command=Command.CM)
    with pytest.raises(PydanticValidationError, match=".ang"):
        AnalysisRequest(command=Command.FROM_ANGULATION, input_path="d6.bq")
