import json
import re
from collections import OrderedDict
from importlib import resources

import pytest

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")


@pytest.fixture(scope="session")
def schema():
    cache = {}

    def load(name: str) -> dict:
        if name not in cache:
            text = resources.files("lowt").joinpath("schemas", f"{name}.schema.json").read_text()
            cache[name] = json.loads(text)
        return cache[name]

    return load


@pytest.fixture(scope="session")
def validate(schema):
    import jsonschema
    from referencing import Registry, Resource

    names = ["circuit", "sketch", "manifest", "channel_report", "verify_report",
             "nullity_report", "bench_report", "analyze_report", "function"]
    registry = Registry().with_resources(
        (f"lowt/{n}.schema.json", Resource.from_contents(schema(n))) for n in names)

    def check(doc, name):
        s = schema(name)
        jsonschema.Draft202012Validator(s, registry=registry).validate(doc)

    return check


def pytest_terminal_summary(terminalreporter):
    verdicts: "OrderedDict[int, bool]" = OrderedDict()
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            m = _CRITERION.search(getattr(rep, "nodeid", ""))
            if not m or (rep.when != "call" and key == "passed"):
                continue
            num = int(m.group(1))
            verdicts[num] = verdicts.get(num, True) and key == "passed"
    if not verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(verdicts):
        terminalreporter.write_line(f"criterion {num:2d}: {'PASS' if verdicts[num] else 'FAIL'}")
