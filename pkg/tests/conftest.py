"""Run every test in a worker thread with a large stack: the machines and
the denotational evaluator recurse proportionally to derivation depth."""

import pytest

from recx.workbench import run_deep

try:
    from hypothesis import HealthCheck, settings

    settings.register_profile(
        "recx",
        deadline=None,
        max_examples=60,
        derandomize=True,
        suppress_health_check=[HealthCheck.too_slow],
    )
    settings.load_profile("recx")
except ImportError:  # pragma: no cover
    pass


@pytest.hookimpl(tryfirst=True)
def pytest_pyfunc_call(pyfuncitem):
    testfunction = pyfuncitem.obj
    names = pyfuncitem._fixtureinfo.argnames
    kwargs = {name: pyfuncitem.funcargs[name] for name in names}
    run_deep(lambda: testfunction(**kwargs))
    return True
