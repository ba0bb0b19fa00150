"""Compare the compiled and pure-Python string kernels.

    python3 benchmarks/bench_kernels.py [--lines N] [--repeat R]
"""

import argparse
import random
import timeit

from rdfmsg import _purepy

try:
    from rdfmsg import _speedups
except ImportError:
    _speedups = None


def sample_lines(n, seed=7):
    rng = random.Random(seed)
    lines = []
    for k in range(n):
        s = f"<http://example.org/s{k % 97}>" if rng.random() < 0.7 else f"_:b{k % 13}"
        o = rng.choice(
            [
                f'"value {k} with \\"quotes\\" and \\n newline"',
                f'"{rng.randint(0, 10**6)}"^^<http://www.w3.org/2001/XMLSchema#integer>',
                '"caf\\u00E9"@fr',
                f"<http://example.org/o{k}>",
            ]
        )
        g = " <http://example.org/g>" if rng.random() < 0.3 else ""
        lines.append(f"{s} <http://example.org/p{k % 5}> {o}{g} .")
    return lines


def run(module, lines, texts, repeat):
    parse = module.parse_nquad_line
    escape = module.escape_string
    unescape = module.unescape_string
    results = {}
    results["parse_nquad_line"] = min(timeit.repeat(lambda: [parse(x) for x in lines], number=1, repeat=repeat))
    results["escape_string"] = min(timeit.repeat(lambda: [escape(x) for x in texts], number=1, repeat=repeat))
    escaped = [escape(x) for x in texts]
    results["unescape_string"] = min(timeit.repeat(lambda: [unescape(x) for x in escaped], number=1, repeat=repeat))
    return results


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lines", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    lines = sample_lines(args.lines)
    texts = [f'line {k}\twith "quotes"\\ and \x01 control\n' for k in range(args.lines)]
    pure = run(_purepy, lines, texts, args.repeat)
    if _speedups is None:
        print("compiled kernels not built; pure-Python timings only")
    fast = run(_speedups, lines, texts, args.repeat) if _speedups else {}
    print(f"{'kernel':<18}{'python (ms)':>14}{'cython (ms)':>14}{'speed-up':>10}")
    for name, t in pure.items():
        if name in fast:
            print(f"{name:<18}{t * 1e3:>14.1f}{fast[name] * 1e3:>14.1f}{t / fast[name]:>9.1f}x")
        else:
            print(f"{name:<18}{t * 1e3:>14.1f}{'-':>14}{'-':>10}")


if __name__ == "__main__":
    main()
