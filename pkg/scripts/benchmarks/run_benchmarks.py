# scripts/benchmarks/run_benchmarks.py

import argparse
import asyncio
import logging
from pathlib import Path
from src.python.cli.config_parser import parse_config
from src.python.cli.pipeline import run_sweep

async def run_benchmarks(config_dir: str, out_root: str):
    """Run every benchmark config in a directory as one concurrent sweep."""
    paths = sorted(Path(config_dir).glob('*.conf'))
    configs = [
        parse_config(path.read_text(encoding='utf-8'),
                     overrides={'out_dir': str(Path(out_root) / path.stem)})
        for path in paths
    ]

    results = await run_sweep(configs)

    failures = 0
    for path, (exit_code, report) in zip(paths, results):
        failed = [c.name for c in report.checks if not c.passed]
        status = 'pass' if exit_code == 0 else f"exit {exit_code}"
        print(f"{path.stem}: {status}{' (' + ', '.join(failed) + ')' if failed else ''}")
        failures += exit_code != 0

    print(f"Benchmarks complete: {len(paths) - failures}/{len(paths)} passed.")
    return failures

if __name__ == "__main__":
    parser = argparse.ArgumentParser(
        description="Run the benchmark configurations and summarize their verdicts"
    )
    parser.add_argument("--config-dir", default="config/examples")
    parser.add_argument("--out-dir", default="out/benchmarks")

    args = parser.parse_args()
    logging.basicConfig(level=logging.WARNING)

    raise SystemExit(1 if asyncio.run(run_benchmarks(args.config_dir, args.out_dir)) else 0)
