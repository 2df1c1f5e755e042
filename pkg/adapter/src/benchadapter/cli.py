import argparse
import sys

from .server import AdapterConfig, serve


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="benchadapter",
        description="Child-process evaluator speaking the JSON-lines protocol on stdin/stdout.",
    )
    parser.add_argument("--mode", choices=["replay", "live"], default="replay")
    parser.add_argument("--dataset", help="results CSV for replay mode (default: bundled)")
    parser.add_argument("--hook", help="path to a module defining benchmark() for live mode")
    parser.add_argument("--latency-s", type=float, default=0.0, help="artificial reply delay")
    parser.add_argument(
        "--inject-timeout", action="store_true", help="swallow the next eval request (testing)"
    )
    parser.add_argument(
        "--inject-malformed", action="store_true", help="garble the next reply (testing)"
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = AdapterConfig(
            mode=args.mode,
            dataset=args.dataset,
            hook=args.hook,
            latency_s=args.latency_s,
            inject_timeout=args.inject_timeout,
            inject_malformed=args.inject_malformed,
        )
    except ValueError as exc:
        print(f"benchadapter: {exc}", file=sys.stderr)
        return 2
    return serve(config)


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
