#!/usr/bin/env python3
"""Regenerate the committed packet test vectors.

Same output as `loopmix vectors`; kept as a script so the vector file has an
obvious provenance and a one-line refresh command.
"""

import argparse
import json
import sys
from pathlib import Path

from loopmix.cli import generate_vectors


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--cases", type=int, default=10)
    parser.add_argument("--out", default="tests/data/packet_vectors.json")
    args = parser.parse_args(argv)

    doc = generate_vectors(args.seed, args.cases)
    Path(args.out).write_text(json.dumps(doc, indent=2) + "\n")
    print(f"wrote {args.out} ({args.cases} cases, seed {args.seed})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
