"""Netfilter/iptables ``LOG`` target lines as seen in syslog.

A line looks like::

    Mar 15 14:22:31 gw kernel: [1234.5] DROP IN=eth0 OUT= MAC=... SRC=141.142.96.167
    DST=12.72.8.5 LEN=60 TOS=0x00 PREC=0x00 TTL=64 ID=44321 DF PROTO=TCP SPT=33211
    DPT=80 WINDOW=5840 RES=0x00 SYN URGP=0

(one line in the log).  Every token that is not turned into a field is kept
as literal text, and fields whose value is unchanged are written back with
their original spelling, so an identity run reproduces the input exactly.
"""

from __future__ import annotations

import calendar
import re
import time
from importlib import resources

from ..errors import RecordError
from ..policy.schema import ModuleSchema
from ..record import FieldKind, FieldValue, Record, format_ipv4, format_mac
from .base import LineModule

MONTHS = ("Jan", "Feb", "Mar", "Apr", "May", "Jun",
          "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")
_MONTH_NUM = {m: i + 1 for i, m in enumerate(MONTHS)}

PROTO_NAMES = {"ICMP": 1, "TCP": 6, "UDP": 17, "ESP": 50, "AH": 51, "UDPLITE": 136}
PROTO_BY_NUM = {v: k for k, v in PROTO_NAMES.items()}

_HEADER = re.compile(r"([A-Z][a-z]{2}) ([ \d]\d) (\d\d):(\d\d):(\d\d) (\S+) ")
_PAYLOAD_START = re.compile(r"(?:^| )IN=")
_TOKEN = re.compile(r"(\S+)( *)")
_IPV4 = re.compile(r"(\d{1,3})\.(\d{1,3})\.(\d{1,3})\.(\d{1,3})\Z")
_MAC14 = re.compile(r"(?:[0-9a-fA-F]{2}:){13}[0-9a-fA-F]{2}\Z")

K = FieldKind


def _parse_ipv4(text: str) -> int:
    m = _IPV4.match(text)
    if not m:
        raise RecordError(f"not a dotted-quad IPv4 address: {text!r}")
    a, b, c, d = (int(x) for x in m.groups())
    if a > 255 or b > 255 or c > 255 or d > 255:
        raise RecordError(f"not a dotted-quad IPv4 address: {text!r}")
    return (a << 24) | (b << 16) | (c << 8) | d


def _render_ip(fv):
    return format_ipv4(fv.value)


def _render_mac(fv):
    return format_mac(fv.value)


def _render_int(fv):
    return str(fv.value)


def _render_hex8(fv):
    return f"0x{fv.value:02X}"


def _render_proto(fv):
    return PROTO_BY_NUM.get(fv.value, str(fv.value))


def _render_text(fv):
    return fv.value


def _render_paren(fv):
    return f"({fv.value})"


# KEY -> (field name, kind, renderer)
_INT_KEYS = {
    "TOS": ("tos", K.UINT8, _render_hex8),
    "TTL": ("ttl", K.UINT8, _render_int),
    "ID": ("ip_id", K.UINT16, _render_int),
    "SPT": ("spt", K.PORT, _render_int),
    "DPT": ("dpt", K.PORT, _render_int),
    "WINDOW": ("window", K.UINT16, _render_int),
    "SEQ": ("seq", K.UINT32, _render_int),
    "TYPE": ("icmp_type", K.UINT8, _render_int),
    "CODE": ("icmp_code", K.UINT8, _render_int),
}
# keys only meaningful before PROTO= (IP header) or after it (transport header)
_BEFORE_PROTO = {"TOS", "TTL", "ID"}
_AFTER_PROTO = {"SPT", "DPT", "WINDOW", "SEQ", "TYPE", "CODE"}


class NetfilterModule(LineModule):
    """Parser module for iptables ``LOG`` lines.

    ``year`` fills in the year syslog dates omit (default: the current
    year when the module is created); ``utc_offset`` is the offset in
    seconds of the log's local time from UTC.
    """

    name = "netfilter"

    def __init__(self, strict: bool = True, year: int | None = None, utc_offset: int = 0):
        super().__init__(strict)
        self.year = year if year is not None else time.gmtime().tm_year
        self.utc_offset = utc_offset
        self._schema: ModuleSchema | None = None
        self._ts_cache: dict[str, int] = {}

    def get_module_schema(self) -> ModuleSchema:
        if self._schema is None:
            doc = resources.files(__package__).joinpath("netfilter_schema.xml").read_text("utf-8")
            self._schema = ModuleSchema.from_xml(doc)
        return self._schema

    # timestamps ---------------------------------------------------------

    def _parse_ts(self, m) -> int:
        key = m.group(0)
        ts = self._ts_cache.get(key)
        if ts is None:
            mon, day, hh, mm, ss = m.group(1, 2, 3, 4, 5)
            month = _MONTH_NUM.get(mon)
            if month is None:
                raise RecordError(f"unknown month {mon!r}")
            try:
                ts = calendar.timegm((self.year, month, int(day), int(hh), int(mm), int(ss),
                                      0, 0, 0)) - self.utc_offset
            except (ValueError, OverflowError) as exc:
                raise RecordError(f"bad syslog timestamp: {exc}") from None
            if ts < 0:
                raise RecordError("syslog timestamp before the epoch")
            if len(self._ts_cache) > 4096:
                self._ts_cache.clear()
            self._ts_cache[key] = ts
        return ts

    def render_timestamp(self, fv: FieldValue) -> str:
        t = time.gmtime(fv.value + self.utc_offset)
        return f"{MONTHS[t.tm_mon - 1]} {t.tm_mday:2d} {t.tm_hour:02d}:{t.tm_min:02d}:{t.tm_sec:02d}"

    # parsing ------------------------------------------------------------

    def parse_line(self, line: str) -> Record:
        if not line:
            raise RecordError("empty line")
        head = _HEADER.match(line)
        if head is None:
            raise RecordError("no syslog header")
        rest_at = head.end()
        found = _PAYLOAD_START.search(line, rest_at)
        if found is None:
            raise RecordError("no iptables LOG payload (IN= missing)")
        payload_at = found.start() if line[found.start()] == "I" else found.start() + 1

        ts = FieldValue(K.TIMESTAMP, self._parse_ts(head))
        host_text = head.group(6)
        fields = [("timestamp", ts), ("hostname", FieldValue(K.TEXT, host_text))]
        layout: list = [
            ("timestamp", ts, line[:15], self.render_timestamp),
            line[15:head.start(6)],
            ("hostname", fields[1][1], host_text, _render_text),
            line[head.end(6):payload_at],
        ]
        seen = {"timestamp", "hostname"}
        lit: list[str] = []

        def literal(s):
            lit.append(s)

        def ref(name, fv, text, render):
            if lit:
                layout.append("".join(lit))
                lit.clear()
            layout.append((name, fv, text, render))
            fields.append((name, fv))
            seen.add(name)

        after_proto = False
        proto_num = None
        inner = False
        df_done = False
        tokens = _TOKEN.findall(line, payload_at)
        i, n = 0, len(tokens)
        while i < n:
            tok, sep = tokens[i]
            i += 1
            if inner or tok[0] == "[":
                # embedded packet of an ICMP error: only its addresses are fields
                body, pre, post = tok, "", ""
                if body.startswith("["):
                    inner, pre, body = True, "[", body[1:]
                if body.endswith("]"):
                    inner, post, body = False, "]", body[:-1]
                key, eq, val = body.partition("=")
                name = {"SRC": "inner_src_ip", "DST": "inner_dst_ip"}.get(key) if eq else None
                if name and name not in seen:
                    fv = FieldValue(K.IPV4, _parse_ipv4(val))
                    literal(pre + key + "=")
                    ref(name, fv, val, _render_ip)
                    literal(post + sep)
                else:
                    literal(tok + sep)
                continue

            key, eq, val = tok.partition("=")
            if not eq:
                if tok == "DF" and not after_proto and not df_done:
                    ref("df", FieldValue(K.FLAG, 1), tok + sep,
                        lambda fv, _t=tok + sep: _t if fv.value else "")
                    df_done = True
                elif tok == "OPT" and i < n and tokens[i][0].startswith("(") \
                        and tokens[i][0].endswith(")"):
                    name = "tcp_options" if after_proto else "ip_options"
                    opt_tok, opt_sep = tokens[i]
                    i += 1
                    if name in seen:
                        literal(tok + sep + opt_tok + opt_sep)
                        continue
                    literal(tok + sep)
                    ref(name, FieldValue(K.TEXT, opt_tok[1:-1]), opt_tok, _render_paren)
                    literal(opt_sep)
                else:
                    literal(tok + sep)
                continue

            if key == "PROTO" and not after_proto:
                if not df_done:
                    ref("df", FieldValue(K.FLAG, 0), "", lambda fv: "DF " if fv.value else "")
                    df_done = True
                after_proto = True
                num = PROTO_NAMES.get(val)
                if num is None:
                    if not val.isdigit() or int(val) > 255:
                        raise RecordError(f"unknown protocol {val!r}")
                    num = int(val)
                proto_num = num
                literal(key + "=")
                ref("proto", FieldValue(K.UINT8, num), val, _render_proto)
                literal(sep)
            elif key in ("SRC", "DST") and not after_proto:
                name = "src_ip" if key == "SRC" else "dst_ip"
                if name in seen:
                    literal(tok + sep)
                    continue
                literal(key + "=")
                ref(name, FieldValue(K.IPV4, _parse_ipv4(val)), val, _render_ip)
                literal(sep)
            elif key == "MAC" and _MAC14.match(val) and "mac_dst" not in seen:
                literal("MAC=")
                ref("mac_dst", FieldValue(K.MAC, bytes.fromhex(val[:17].replace(":", ""))),
                    val[:17], _render_mac)
                literal(":")
                ref("mac_src", FieldValue(K.MAC, bytes.fromhex(val[18:35].replace(":", ""))),
                    val[18:35], _render_mac)
                literal(val[35:] + sep)
            elif key == "OPT" and "=" in tok:
                name = "tcp_options" if after_proto else "ip_options"
                if name in seen:
                    literal(tok + sep)
                    continue
                literal("OPT=")
                ref(name, FieldValue(K.TEXT, val), val, _render_text)
                literal(sep)
            elif key in _INT_KEYS:
                name, kind, render = _INT_KEYS[key]
                if name in seen or (after_proto and key in _BEFORE_PROTO) \
                        or (not after_proto and key in _AFTER_PROTO) \
                        or (key == "SEQ" and proto_num != 6):
                    literal(tok + sep)
                    continue
                try:
                    fv = FieldValue(kind, int(val, 16) if render is _render_hex8 else int(val))
                except ValueError:
                    raise RecordError(f"bad value for {key}: {val!r}") from None
                literal(key + "=")
                ref(name, fv, val, render)
                literal(sep)
            else:
                literal(tok + sep)

        if not df_done:
            ref("df", FieldValue(K.FLAG, 0), "", lambda fv: " DF" if fv.value else "")
        if lit:
            layout.append("".join(lit))
        return Record(fields, layout=layout)

    def serialize_record(self, record: Record) -> str:
        layout = record.layout
        if layout is None:
            raise RecordError("record has no netfilter layout; it was not produced by this module")
        get = record.get
        parts = []
        for seg in layout:
            if seg.__class__ is str:
                parts.append(seg)
                continue
            name, orig, text, render = seg
            value = get(name)
            if value is None:
                raise RecordError(f"field {name!r} missing from record")
            parts.append(text if value == orig else render(value))
        return "".join(parts)

