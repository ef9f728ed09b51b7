#!/usr/bin/env python3
"""Walk through a genuinely obstructed deformation.

The point: a 3-punctured sphere with all rank-2 peripheral images diagonal.
Its obstruction space is one-dimensional and every parabolic tangent
direction fails to extend past first order.  The script shows the failure
and contrasts it with the honest decay of the first-order family.
"""

import numpy as np

from surfrep import (
    ObstructionFound,
    analyze,
    build_deformation,
    obstructed_instance,
    verify_deformation,
)


def main() -> None:
    rho, direction = obstructed_instance()
    report = analyze(rho)

    print("point: 3-punctured sphere, rank 2, commuting diagonal images")
    print(f"  tangent dim      {report.tangent_dim}")
    print(f"  expected dim     {report.expected_dim}")
    print(f"  obstruction dim  {report.relative_h2_dim}")
    print(f"  irreducible      {report.irreducible}")

    print("\nattempting an order-2 extension of the first tangent direction:")
    try:
        build_deformation(rho, direction, order=2)
        print("  unexpectedly succeeded")
    except ObstructionFound as exc:
        print(f"  ObstructionFound at order {exc.order}, "
              f"residual norm {exc.residual_norm:.6f}")

    print("\nthe first-order family itself is fine, it just stops there:")
    state = build_deformation(rho, direction, order=1)
    verdict = verify_deformation(state)
    for t, total in zip(verdict["ts"], verdict["total_residuals"]):
        print(f"  t = {t:7.4f}   residual = {total:.3e}")
    print(f"  fitted decay slope {verdict['slope']:.3f} "
          f"(a second-order family would need >= 2.7)")


if __name__ == "__main__":
    main()
