import pytest

from conftest import ICMP_LINE, TCP_LINE, policy_xml, run_module
from loganon.errors import RecordError
from loganon.modules import NetfilterModule
from loganon.policy import build_plan, parse_policy
from loganon.record import FieldKind, FieldValue, ipv4, mac, port
from loganon.testing import netfilter_corpus

ANNIHILATION, SHIFT, ENUM = "time-unit-annihilation", "random-shift", "enumeration"
IP_ALGOS = {"black-marker", "truncation", "random-permutation", "prefix-preserving"}


def roundtrip(module, line):
    return module.serialize_record(module.parse_line(line))


def test_tcp_line_fields(netfilter):
    r = netfilter.parse_line(TCP_LINE)
    assert r["timestamp"].value == 1142432551
    assert r["hostname"].value == "gw"
    assert r["src_ip"] == ipv4("141.142.96.167")
    assert r["dst_ip"] == ipv4("12.72.8.5")
    assert r["dpt"] == port(80) and r["spt"] == port(33211)
    assert r["df"].value == 1
    assert r["proto"].value == 6
    assert (r["tos"].value, r["ttl"].value, r["ip_id"].value) == (0, 64, 44321)
    assert (r["window"].value, r["seq"].value) == (5840, 11111)
    assert roundtrip(netfilter, TCP_LINE) == TCP_LINE


def test_icmp_line_has_no_ports(netfilter):
    r = netfilter.parse_line(ICMP_LINE)
    assert "spt" not in r and "dpt" not in r and "seq" not in r
    assert (r["icmp_type"].value, r["icmp_code"].value) == (8, 0)
    assert r["ip_id"].value == 0  # the echo ID after PROTO is not the IP ID
    assert r["mac_dst"] == mac("00:16:3e:11:22:33")
    assert r["mac_src"] == mac("00:1b:21:aa:bb:cc")
    assert r["df"].value == 0
    assert roundtrip(netfilter, ICMP_LINE) == ICMP_LINE


def test_icmp_error_inner_packet(netfilter):
    line = ("Mar 15 14:22:33 gw kernel: IN=eth0 OUT= SRC=10.0.0.1 DST=10.0.0.2 LEN=80 TOS=0x00 "
            "PREC=0xC0 TTL=64 ID=7 PROTO=ICMP TYPE=3 CODE=3 [SRC=10.0.0.2 DST=10.0.0.1 LEN=52 "
            "TOS=0x00 PREC=0x00 TTL=64 ID=1 PROTO=UDP SPT=53 DPT=33000 LEN=32 ] ")
    r = netfilter.parse_line(line)
    assert r["inner_src_ip"] == ipv4("10.0.0.2") and r["inner_dst_ip"] == ipv4("10.0.0.1")
    assert "spt" not in r
    r2 = r.replace({"inner_src_ip": ipv4("1.1.1.1")})
    assert "[SRC=1.1.1.1 DST=10.0.0.1 " in netfilter.serialize_record(r2)
    assert roundtrip(netfilter, line) == line


@pytest.mark.parametrize("line", [
    "", "not a syslog line", "Mar 15 14:22:31 gw kernel: no payload here",
    "Mar 15 14:22:31 gw kernel: IN=eth0 SRC=300.1.1.1 DST=1.1.1.1 PROTO=TCP",
    "Mar 15 14:22:31 gw kernel: IN=eth0 SRC=1.1.1.1 DST=1.1.1.1 PROTO=TCP SPT=70000",
    "Mar 15 14:22:31 gw kernel: IN=eth0 SRC=1.1.1.1 DST=1.1.1.1 PROTO=BOGUS",
    "Xyz 15 14:22:31 gw kernel: IN=eth0 SRC=1.1.1.1 DST=1.1.1.1 PROTO=TCP",
])
def test_unparsable(netfilter, line):
    with pytest.raises(RecordError):
        netfilter.parse_line(line)


def test_truncated_source_changes_only_that_token(netfilter):
    r = netfilter.parse_line(TCP_LINE)
    out = netfilter.serialize_record(r.replace({"src_ip": ipv4("141.142.0.0")}))
    assert out == TCP_LINE.replace("SRC=141.142.96.167", "SRC=141.142.0.0")


def test_black_markered_options_become_null_string(netfilter):
    line = TCP_LINE.replace("DF PROTO", "DF OPT (0303) PROTO") + "OPT=020405B4 "
    r = netfilter.parse_line(line)
    assert r["ip_options"].value == "0303" and r["tcp_options"].value == "020405B4"
    blank = FieldValue(FieldKind.TEXT, "")
    out = netfilter.serialize_record(r.replace({"tcp_options": blank, "ip_options": blank}))
    assert "OPT=020405B4" not in out and " OPT= " in out
    assert "OPT () PROTO" in out


def test_df_flag_rendered_present_or_absent(netfilter):
    r = netfilter.parse_line(TCP_LINE)
    out = netfilter.serialize_record(r.replace({"df": FieldValue(FieldKind.FLAG, 0)}))
    assert " DF " not in out and "ID=44321 PROTO=TCP" in out
    icmp = netfilter.parse_line(ICMP_LINE)
    out = netfilter.serialize_record(icmp.replace({"df": FieldValue(FieldKind.FLAG, 1)}))
    assert "ID=0 DF PROTO=ICMP" in out


def test_protocol_black_marker_renders_number(netfilter):
    r = netfilter.parse_line(TCP_LINE)
    out = netfilter.serialize_record(r.replace({"proto": FieldValue(FieldKind.UINT8, 255)}))
    assert "PROTO=255 " in out


def test_timestamp_rendering(netfilter):
    r = netfilter.parse_line(TCP_LINE)
    out = netfilter.serialize_record(r.replace({"timestamp": FieldValue(FieldKind.TIMESTAMP, 0)}))
    assert out.startswith("Jan  1 00:00:00 gw ")
    shifted = NetfilterModule(year=2006, utc_offset=3600)
    assert shifted.parse_line(TCP_LINE)["timestamp"].value == 1142432551 - 3600
    assert roundtrip(shifted, TCP_LINE) == TCP_LINE


def test_parse_serialize_parse_is_stable(netfilter):
    for line in netfilter_corpus(300, seed=4):
        body = line.rstrip("\n")
        first = netfilter.parse_line(body)
        again = netfilter.parse_line(netfilter.serialize_record(first))
        assert list(again) == list(first)


def test_schema_matches_field_catalog(netfilter):
    s = netfilter.get_module_schema()
    by_kind = {}
    for f in s:
        by_kind.setdefault(f.kind, set()).add(frozenset(f.algorithms))
    assert by_kind[FieldKind.TIMESTAMP] == {frozenset({ANNIHILATION, SHIFT, ENUM})}
    assert by_kind[FieldKind.IPV4] == {frozenset(IP_ALGOS)}
    assert by_kind[FieldKind.MAC] == {frozenset({"black-marker", "truncation",
                                                 "random-permutation"})}
    assert by_kind[FieldKind.PORT] == {frozenset({"black-marker", "bilateral-classification",
                                                  "random-permutation"})}
    for name in ("proto", "ip_id", "tos", "ttl", "df", "window", "seq", "ip_options",
                 "tcp_options", "icmp_type", "icmp_code"):
        assert s[name].algorithms == ("black-marker",), name


def test_every_parsed_field_is_in_schema(netfilter):
    s = netfilter.get_module_schema()
    for line in (TCP_LINE, ICMP_LINE):
        assert all(n in s for n in netfilter.parse_line(line).names())


def test_full_policy_through_module(netfilter):
    doc = policy_xml(("src_ip", "truncation", {"keep_bits": 16}),
                     ("spt", "bilateral-classification"),
                     ("hostname", "hostname-black-marker", {"scope": "full"}),
                     ("mac_src", "black-marker"))
    plan = build_plan(parse_policy(doc), netfilter.get_module_schema())
    out, report = run_module(netfilter, TCP_LINE + "\n" + ICMP_LINE + "\n", plan)
    a, b = out.splitlines()
    assert "SRC=141.142.0.0" in a and "SPT=65535" in a and " host kernel:" in a
    assert "MAC=00:16:3e:11:22:33:00:00:00:00:00:00:08:00" in b
    assert report.records_in == report.records_out == 2
