"""Survey split metacyclic seeds and the deepest central-power tower each one supports."""
import argparse
import json

from pgtower.constructions import seed_search
from pgtower.errors import SearchExhausted
from pgtower.group import DEFAULT_ORDER_CAP
from pgtower.spec import describe, to_json
from pgtower.tower import build_tower


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--order-cap", type=int, default=DEFAULT_ORDER_CAP)
    ap.add_argument("--depth", type=int, default=6)
    args = ap.parse_args()

    rows = []
    for p, q in [(2, 2), (2, 4), (3, 3), (5, 5)]:
        try:
            seed = seed_search(p, q)
        except SearchExhausted as exc:
            rows.append({"p": p, "q": q, "seed": None, "note": str(exc)})
            continue
        tower = build_tower(seed, "central_power", p, args.depth, order_cap=args.order_cap)
        rows.append({
            "p": p, "q": q, "seed": to_json(seed), "label": describe(seed),
            "stage_orders": [G.order for G in tower.stages],
            "monolithic": [a.monolithic for a in tower.audits],
            "truncated_at": tower.truncated_at,
        })
    print(json.dumps(rows, indent=2))


if __name__ == "__main__":
    main()
