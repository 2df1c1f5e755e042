import sys
from pathlib import Path

import pytest

from combosearch import (
    Dimension,
    ExternalEvaluator,
    SearchConfig,
    SearchSpace,
    run_search,
)
from combosearch.evaluators.external import (
    EvaluatorDeadError,
    ProtocolSetupError,
    run_protocol_checks,
)
from combosearch.run import SearchAbortedError

STUB = str(Path(__file__).parent / "stub_child.py")


def stub_cmd(mode="ok"):
    return [sys.executable, STUB, mode]


@pytest.fixture
def tiny_space():
    return SearchSpace(
        (
            Dimension("network", ("n0", "n1")),
            Dimension("framework", ("f0", "f1")),
            Dimension("compression", ("c0", "c1")),
        )
    )


def test_ok_stub_round_trip(tiny_space):
    with ExternalEvaluator(stub_cmd(), space=tiny_space, timeout_s=10) as ev:
        assert ev.name == "stub-ok"
        result = ev.evaluate(tiny_space.combination_at(0))
        assert result.ok and result.accuracy == 0.5 and result.time_s == 1.0


def test_search_through_stub(tiny_space):
    with ExternalEvaluator(stub_cmd(), space=tiny_space, timeout_s=10) as ev:
        table, state = run_search(tiny_space, ev, SearchConfig(iterations=10, seed=1))
    assert len(table) >= 1
    assert all(rec.m == 0.5 for rec in table.ok_records())


def test_timeout_classified(tiny_space):
    with ExternalEvaluator(stub_cmd("silent"), space=tiny_space, timeout_s=0.3) as ev:
        result = ev.evaluate(tiny_space.combination_at(2))
        assert result.status == "timeout"


def test_bad_json_reply(tiny_space):
    with ExternalEvaluator(stub_cmd("bad-json"), space=tiny_space, timeout_s=10) as ev:
        result = ev.evaluate(tiny_space.combination_at(0))
        assert result.status == "protocol_error"


def test_wrong_id_reply(tiny_space):
    with ExternalEvaluator(stub_cmd("wrong-id"), space=tiny_space, timeout_s=10) as ev:
        result = ev.evaluate(tiny_space.combination_at(0))
        assert result.status == "protocol_error"
        assert "id" in result.detail


def test_bad_payload_never_leaks(tiny_space):
    with ExternalEvaluator(stub_cmd("bad-payload"), space=tiny_space, timeout_s=10) as ev:
        result = ev.evaluate(tiny_space.combination_at(0))
        assert result.status == "protocol_error"


def test_wrong_protocol_handshake(tiny_space):
    with pytest.raises(ProtocolSetupError, match="protocol"):
        ExternalEvaluator(stub_cmd("wrong-proto"), space=tiny_space, timeout_s=10)


def test_mute_child_fails_handshake(tiny_space):
    with pytest.raises(ProtocolSetupError):
        ExternalEvaluator(stub_cmd("mute"), space=tiny_space, timeout_s=0.3)


def test_spawn_failure():
    with pytest.raises(ProtocolSetupError, match="spawn"):
        ExternalEvaluator(["/nonexistent/binary-xyz"], timeout_s=1)


def test_child_exit_marks_dead_and_aborts_search(tiny_space):
    ev = ExternalEvaluator(stub_cmd("exit-mid"), space=tiny_space, timeout_s=10)
    result = ev.evaluate(tiny_space.combination_at(0))
    assert result.status == "protocol_error"
    assert ev.dead
    with pytest.raises(EvaluatorDeadError):
        ev.evaluate(tiny_space.combination_at(1))
    ev.close()


def test_run_search_abort_carries_context(tiny_space):
    ev = ExternalEvaluator(stub_cmd("exit-mid"), space=tiny_space, timeout_s=10)
    # first request returns protocol_error (recorded), second raises dead
    with pytest.raises(SearchAbortedError, match="iteration"):
        run_search(tiny_space, ev, SearchConfig(iterations=10, seed=0, cache_evaluations=False))
    ev.close()


# --- conformance checks ---------------------------------------------------

OK_COMBINATION = {"network": "n0", "framework": "f0", "compression": "c0"}


def test_protocol_checks_all_pass():
    results = run_protocol_checks(stub_cmd(), OK_COMBINATION, timeout_s=10)
    assert all(r.passed for r in results), [
        (r.name, r.detail) for r in results if not r.passed
    ]
    names = [r.name for r in results]
    assert names == [
        "spawn",
        "handshake",
        "evaluation",
        "unknown-combination",
        "timeout-classification",
        "recovery",
        "shutdown",
    ]


def test_protocol_checks_silent_child():
    results = run_protocol_checks(stub_cmd("silent"), OK_COMBINATION, timeout_s=0.3)
    by_name = {r.name: r for r in results}
    assert by_name["handshake"].passed
    assert not by_name["evaluation"].passed          # liveness lost
    assert by_name["timeout-classification"].passed  # forced timeout still classified


def test_protocol_checks_wrong_proto():
    results = run_protocol_checks(stub_cmd("wrong-proto"), OK_COMBINATION, timeout_s=5)
    by_name = {r.name: r for r in results}
    assert not by_name["handshake"].passed
