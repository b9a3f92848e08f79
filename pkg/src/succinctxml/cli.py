"""Command-line interface: build an index, query it, benchmark a query file."""

from __future__ import annotations

import argparse
import resource
import sys
import time

from .errors import IndexFormatError, RejectedInputError, UnsupportedQueryError, XMLSyntaxError, XPathSyntaxError
from .fmindex import DEFAULT_SAMPLE_RATE
from .index import XmlIndex

EXIT_OK = 0
EXIT_QUERY = 2
EXIT_IO = 3
STRATEGY_CHOICES = ("auto", "topdown", "bottomup", "naive", "memoized", "jumping")


def _peak_rss_kb() -> int:
    # ru_maxrss is in kilobytes on Linux
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def cmd_build(args) -> int:
    t0 = time.perf_counter()
    try:
        with open(args.xml, "rb") as fh:
            data = fh.read()
        idx = XmlIndex.build(data, sample_rate=args.sample_rate, plain_text=args.plain_text,
                             keep_whitespace=args.keep_ws)
        total = idx.save(args.index)
    except (OSError, XMLSyntaxError, RejectedInputError) as exc:
        _err(str(exc))
        return EXIT_IO
    elapsed = time.perf_counter() - t0
    h = idx.header
    print(f"n={h.n} d={h.d} t={h.t} u={h.u} sample_rate={h.sample_rate}")
    for name, size in idx.section_sizes().items():
        print(f"section {name}: {size} bytes")
    print(f"input {len(data)} bytes, index {total} bytes ({total / max(len(data), 1):.3f}x)")
    print(f"elapsed {elapsed:.3f} s, peak rss {_peak_rss_kb()} KB")
    return EXIT_OK


def _write_results(idx: XmlIndex, ids, out) -> None:
    first = True
    for i in ids:
        if not first:
            out.write(b"\n")
        out.write(idx.serialize(i))
        first = False


def cmd_query(args) -> int:
    try:
        idx = XmlIndex.load(args.index)
        t0 = time.perf_counter()
        res = idx.query(args.xpath, strategy=args.strategy)
        if args.serialize is not None:
            if args.serialize == "-":
                _write_results(idx, res.results, sys.stdout.buffer)
                sys.stdout.buffer.flush()
            else:
                with open(args.serialize, "wb") as out:
                    _write_results(idx, res.results, out)
        elapsed = time.perf_counter() - t0
    except UnsupportedQueryError as exc:
        _err(str(exc))
        return EXIT_QUERY
    except (XPathSyntaxError, ValueError) as exc:
        _err(str(exc))
        return EXIT_QUERY
    except (OSError, IndexFormatError) as exc:
        _err(str(exc))
        return EXIT_IO
    if args.serialize == "-":
        return EXIT_OK
    if args.materialize:
        print(f"materialized {res.count()} results", file=sys.stderr)
    else:
        print(res.count())
    if args.verbose:
        print(f"strategy={res.strategy} elapsed_ms={elapsed * 1000:.2f} visited={res.stats.visited} "
              f"sections={','.join(idx.load_trace)}", file=sys.stderr)
    return EXIT_OK


def read_queries(path) -> list:
    """``(name, query)`` pairs from a file with one query per line, optionally ``name<TAB>query``."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for k, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "\t" in line:
                name, q = line.split("\t", 1)
            else:
                name, q = f"q{k}", line
            out.append((name.strip(), q.strip()))
    return out


class _NullSink:
    def write(self, b) -> int:
        return len(b)


def cmd_bench(args) -> int:
    try:
        idx = XmlIndex.load(args.index)
        queries = read_queries(args.queries)
    except (OSError, IndexFormatError) as exc:
        _err(str(exc))
        return EXIT_IO
    status = EXIT_OK
    print("query\tmode\tbest_ms\tcount\tpeak_rss_kb")
    for name, q in queries:
        timings, counts = [], set()
        try:
            for _ in range(args.repeats):
                t0 = time.perf_counter()
                res = idx.query(q, strategy=args.strategy)
                if args.mode == "serialize":
                    _write_results(idx, res.results, _NullSink())
                n = res.count()
                timings.append((time.perf_counter() - t0) * 1000)
                counts.add(n)
        except (UnsupportedQueryError, XPathSyntaxError, ValueError) as exc:
            _err(f"{name}: {exc}")
            status = EXIT_QUERY
            continue
        count = counts.pop() if len(counts) == 1 else "nondeterministic"
        print(f"{name}\t{args.mode}\t{min(timings):.3f}\t{count}\t{_peak_rss_kb()}")
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="succinctxml", description="Compressed XML index with XPath queries.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="index an XML file")
    b.add_argument("xml")
    b.add_argument("index")
    b.add_argument("--sample-rate", type=int, default=DEFAULT_SAMPLE_RATE)
    b.add_argument("--plain-text", action="store_true", help="also store texts verbatim for fast extraction")
    b.add_argument("--keep-ws", action="store_true", help="keep whitespace-only text nodes")
    b.set_defaults(func=cmd_build)

    q = sub.add_parser("query", help="run an XPath query")
    q.add_argument("index")
    q.add_argument("xpath")
    mode = q.add_mutually_exclusive_group()
    mode.add_argument("--count", action="store_true", help="print the number of results (default)")
    mode.add_argument("--materialize", action="store_true", help="build the result set without output")
    mode.add_argument("--serialize", metavar="OUT", help="write results to OUT ('-' for stdout)")
    q.add_argument("--strategy", choices=STRATEGY_CHOICES, default="auto")
    q.add_argument("-v", "--verbose", action="store_true")
    q.set_defaults(func=cmd_query)

    k = sub.add_parser("bench", help="time every query of a file")
    k.add_argument("index")
    k.add_argument("queries")
    k.add_argument("--repeats", type=int, default=5)
    k.add_argument("--mode", choices=("count", "materialize", "serialize"), default="count")
    k.add_argument("--strategy", choices=STRATEGY_CHOICES, default="auto")
    k.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "repeats", 1) < 1:
        _err("--repeats must be at least 1")
        return EXIT_QUERY
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
