"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--addresses N] [--lines N]

Two measurements: raw prefix-preserving throughput on distinct addresses
(no cache), and a full netfilter run with a prefix-preserving policy.  The
pipeline run is repeated in a subprocess with LOGANON_PURE=1 so the
fallback is chosen at import, the way users would get it.
"""

import argparse
import os
import random
import subprocess
import sys
import tempfile
import time

from loganon import _purepy, kernels
from loganon.testing import netfilter_corpus

POLICY = """<policy>
  <field name="src_ip" algorithm="prefix-preserving"><option name="passphrase" value="bench"/></field>
  <field name="dst_ip" algorithm="prefix-preserving"><option name="passphrase" value="bench"/></field>
  <field name="inner_src_ip" algorithm="prefix-preserving"><option name="passphrase" value="bench"/></field>
  <field name="inner_dst_ip" algorithm="prefix-preserving"><option name="passphrase" value="bench"/></field>
</policy>
"""


def bench_cipher(impl, ips, key):
    cipher = impl.PrefixCipher(key)
    t0 = time.perf_counter()
    out = cipher.anonymize_many(ips)
    return time.perf_counter() - t0, out


def bench_pipeline(src, policy, pure):
    env = dict(os.environ)
    env.pop("LOGANON_PURE", None)
    if pure:
        env["LOGANON_PURE"] = "1"
    with tempfile.TemporaryDirectory() as tmp:
        t0 = time.perf_counter()
        proc = subprocess.run(
            [sys.executable, "-m", "loganon", "-m", "netfilter", "--year", "2006",
             "-i", src, "-o", os.path.join(tmp, "out.log"), "-p", policy],
            env=env, capture_output=True, text=True, check=True)
        elapsed = time.perf_counter() - t0
    kernel = next((ln for ln in proc.stderr.splitlines() if "kernels:" in ln), "")
    return elapsed, kernel.split("kernels:")[-1].strip(" )")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--addresses", type=int, default=50_000)
    ap.add_argument("--lines", type=int, default=50_000)
    args = ap.parse_args()

    rng = random.Random(1)
    key = rng.randbytes(32)
    ips = [rng.getrandbits(32) for _ in range(args.addresses)]

    print(f"prefix-preserving cipher, {args.addresses} distinct addresses")
    t_pure, out_pure = bench_cipher(_purepy, ips, key)
    print(f"  python   {t_pure:8.3f} s  {t_pure / len(ips) * 1e6:7.2f} us/address")
    if kernels.native is None:
        print("  cython   not built")
    else:
        t_nat, out_nat = bench_cipher(kernels.native, ips, key)
        assert out_nat == out_pure, "implementations disagree"
        print(f"  cython   {t_nat:8.3f} s  {t_nat / len(ips) * 1e6:7.2f} us/address"
              f"  ({t_pure / t_nat:.1f}x)")

    with tempfile.TemporaryDirectory() as tmp:
        src = os.path.join(tmp, "in.log")
        with open(src, "w") as fh:
            fh.writelines(netfilter_corpus(args.lines, seed=3))
        policy = os.path.join(tmp, "policy.xml")
        with open(policy, "w") as fh:
            fh.write(POLICY)
        size = os.path.getsize(src) / 1e6
        print(f"\nnetfilter pipeline, {args.lines} lines ({size:.1f} MB), 4 prefix-preserving rules")
        results = {}
        for pure in (True, False):
            elapsed, kernel = bench_pipeline(src, policy, pure)
            results[kernel] = elapsed
            print(f"  {kernel:8} {elapsed:8.3f} s  {size / elapsed:6.2f} MB/s")
        if len(results) == 2:
            print(f"  speedup  {results['python'] / results['cython']:.2f}x")


if __name__ == "__main__":
    main()
