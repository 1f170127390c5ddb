import io
import random

import pytest

from loganon.modules import NetfilterModule
from loganon.testing import netfilter_corpus

TCP_LINE = ("Mar 15 14:22:31 gw kernel: IN=eth0 OUT= SRC=141.142.96.167 DST=12.72.8.5 LEN=60 "
            "TOS=0x00 TTL=64 ID=44321 DF PROTO=TCP SPT=33211 DPT=80 WINDOW=5840 SEQ=11111 ")
ICMP_LINE = ("Mar 15 14:22:32 gw kernel: [8812.345678] DROP IN=eth1 OUT= "
             "MAC=00:16:3e:11:22:33:00:1b:21:aa:bb:cc:08:00 SRC=12.161.3.3 DST=212.3.4.1 LEN=84 "
             "TOS=0x00 PREC=0x00 TTL=63 ID=0 PROTO=ICMP TYPE=8 CODE=0 ID=1764 SEQ=1 ")


def policy_xml(*rules, options=None) -> str:
    """Build a policy document from ``(field, algorithm, {option: value})`` triples."""
    parts = ["<policy>"]
    for name, value in (options or {}).items():
        parts.append(f'  <option name="{name}" value="{value}"/>')
    for rule in rules:
        field, algo, *rest = rule
        opts = rest[0] if rest else {}
        parts.append(f'  <field name="{field}" algorithm="{algo}">')
        for k, v in opts.items():
            parts.append(f'    <option name="{k}" value="{v}"/>')
        parts.append("  </field>")
    parts.append("</policy>")
    return "\n".join(parts) + "\n"


@pytest.fixture
def netfilter():
    return NetfilterModule(year=2006)


@pytest.fixture
def corpus():
    return netfilter_corpus(200, seed=11)


@pytest.fixture
def rng():
    return random.Random(20061015)


def run_module(module, text, plan):
    """Drive ``plan`` over ``text`` through ``module`` in memory; return output text."""
    from loganon.pipeline import run_pipeline
    out = io.StringIO()
    module.set_data_sets(io.StringIO(text), out)
    report = run_pipeline(module, plan)
    return out.getvalue(), report


# -- acceptance reporting ---------------------------------------------------

def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n, title): numbered acceptance criterion")
    config._acceptance = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("acceptance")
    if mark is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    n, title = mark.args
    detail = "; ".join(v for k, v in item.user_properties if k == "detail")
    verdict = "PASS" if rep.passed else "FAIL"
    line = f"criterion {n:>2}: {verdict}  {title}" + (f"  [{detail}]" if detail else "")
    item.config._acceptance[n] = line


def pytest_terminal_summary(terminalreporter, config):
    results = getattr(config, "_acceptance", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
