"""Synthetic inputs for tests and benchmarks."""

from __future__ import annotations

import random
import time

from .modules.netfilter import MONTHS

_PREFIXES = ["", "DROP ", "[UFW BLOCK] ", "FW-IN: "]


def _ip(rng: random.Random) -> str:
    # a few busy subnets so prefixes and repeats occur, as in real logs
    net = rng.choice(["141.142.96", "141.142.132", "12.72.8", "12.161.3", "212.3.4",
                      f"10.{rng.randrange(256)}.{rng.randrange(256)}"])
    return f"{net}.{rng.randrange(256)}"


def _mac(rng: random.Random) -> str:
    return ":".join(f"{rng.randrange(256):02x}" for _ in range(12)) + ":08:00"


def netfilter_line(rng: random.Random, ts: int, host: str = "gw") -> str:
    t = time.gmtime(ts)
    stamp = f"{MONTHS[t.tm_mon - 1]} {t.tm_mday:2d} {t.tm_hour:02d}:{t.tm_min:02d}:{t.tm_sec:02d}"
    head = (f"{stamp} {host} kernel: [{rng.randrange(10**6)}.{rng.randrange(10**6):06d}] "
            f"{rng.choice(_PREFIXES)}IN=eth0 OUT= ")
    if rng.random() < 0.8:
        head += f"MAC={_mac(rng)} "
    ip = (f"SRC={_ip(rng)} DST={_ip(rng)} LEN={rng.randrange(40, 1500)} "
          f"TOS=0x{rng.choice([0, 0, 0x10, 0x08]):02X} PREC=0x00 TTL={rng.randrange(1, 256)} "
          f"ID={rng.randrange(65536)} ")
    if rng.random() < 0.6:
        ip += "DF "
    if rng.random() < 0.05:
        ip += "OPT (0101080A0000) "
    kind = rng.random()
    if kind < 0.6:
        tail = (f"PROTO=TCP SPT={rng.randrange(65536)} DPT={rng.choice([22, 80, 443, 8080, 6881])} "
                f"WINDOW={rng.randrange(65536)} RES=0x00 SYN URGP=0 ")
        if rng.random() < 0.3:
            tail = (f"PROTO=TCP SPT={rng.randrange(65536)} DPT={rng.choice([22, 80, 443])} "
                    f"SEQ={rng.randrange(1 << 32)} ACK=0 WINDOW={rng.randrange(65536)} "
                    f"RES=0x00 SYN URGP=0 OPT (020405B40402080A) ")
    elif kind < 0.9:
        tail = f"PROTO=UDP SPT={rng.randrange(65536)} DPT={rng.choice([53, 123, 137, 5353])} LEN={rng.randrange(8, 512)} "
    elif kind < 0.97:
        tail = f"PROTO=ICMP TYPE=8 CODE=0 ID={rng.randrange(65536)} SEQ={rng.randrange(65536)} "
    else:
        tail = (f"PROTO=ICMP TYPE=3 CODE=3 [SRC={_ip(rng)} DST={_ip(rng)} LEN=52 TOS=0x00 "
                f"PREC=0x00 TTL=64 ID=1 PROTO=UDP SPT=53 DPT=33000 LEN=32 ] ")
    return head + ip + tail


def netfilter_corpus(n: int, seed: int = 0, start: int = 1142432551, year_end: bool = True) -> list[str]:
    """``n`` lines with nondecreasing timestamps, each ending in a newline."""
    rng = random.Random(seed)
    ts = start
    out = []
    for _ in range(n):
        ts += rng.choice([0, 0, 1, 1, 2, 5])
        out.append(netfilter_line(rng, ts) + "\n")
    return out


def displaced_sequence(n: int, max_displacement: int, rng: random.Random,
                       tie_rate: float = 0.3) -> list[int]:
    """Nondecreasing timestamps, then locally shuffled so that no element
    sits more than ``max_displacement`` positions from its sorted place."""
    ts, seq = 1_000_000, []
    for _ in range(n):
        if rng.random() >= tie_rate:
            ts += rng.randint(1, 10)
        seq.append(ts)
    block = max_displacement + 1
    out = []
    for i in range(0, n, block):
        chunk = seq[i:i + block]
        rng.shuffle(chunk)
        out.extend(chunk)
    return out
