#!/usr/bin/env python3
"""
Print the instanton numbers next to the eps-series they come from.

Usage:
    python scripts/instanton_table.py --d-max 20
"""

import argparse
import sys
import os
from pathlib import Path

# Add parent directory to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from dotenv import load_dotenv
from spectral_pf.mirrormap import MIN_MIRROR_ORDER, epsilon_of_sqrtq, instanton_numbers
from spectral_pf.utils import format_fraction, setup_logging

# Load environment
load_dotenv()


def main():
    """Main entry point."""
    parser = argparse.ArgumentParser(
        description="Tabulate eps(s) coefficients and the integer instanton numbers n_d"
    )

    parser.add_argument(
        "--d-max",
        type=int,
        default=20,
        help="Largest degree d (default: 20)"
    )

    parser.add_argument(
        "--order",
        type=int,
        default=None,
        help="Series order (default: SPECTRAL_PF_ORDER or 40, at least d-max)"
    )

    args = parser.parse_args()

    # Setup logging
    setup_logging(os.getenv("LOG_LEVEL", "INFO"))

    order = args.order or int(os.getenv("SPECTRAL_PF_ORDER", "40"))
    order = max(order, args.d_max, MIN_MIRROR_ORDER)

    print(f"\nComputing eps(s) to order {order}...")
    print()

    try:
        eps = epsilon_of_sqrtq(order)
        table = instanton_numbers(eps, args.d_max)
    except (ValueError, ArithmeticError) as e:
        print(f"Failed to compute instanton numbers: {e}")
        sys.exit(1)

    print(f"{'d':>4}  {'[s^d] eps':>16}  {'n_d':>12}")
    for d, n in table.numbers.items():
        print(f"{d:>4}  {format_fraction(eps.coefficient(d)):>16}  {n:>12}")
    print()
    print(f"All {len(table.numbers)} instanton numbers are integers.")


if __name__ == "__main__":
    main()
