#!/usr/bin/env python3
"""Write the bundled demo city landscape to a JSON file.

Usage: python scripts/make_landscape.py [out.json] [--seed N]
"""

import argparse
import json
from pathlib import Path

from cutm.citygen import demo_city_dict


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out", nargs="?", default="landscape.json")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--buildings", type=int, default=12)
    args = parser.parse_args()
    doc = demo_city_dict(seed=args.seed, n_buildings=args.buildings)
    Path(args.out).write_text(json.dumps(doc, indent=1) + "\n")
    print(f"wrote {len(doc['obstacles'])} buildings -> {args.out}")


if __name__ == "__main__":
    main()
