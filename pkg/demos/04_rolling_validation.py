"""Rolling-window validation on a monthly matrix panel.

Each test year is reconstructed by projecting its months onto loading
spaces fitted from the preceding n years.  This script builds a
synthetic 10 x 10 monthly panel (one row factor, two column factors,
mild noise) so it runs without any external data; point
`ingest_portfolios` at a real csv to reproduce the same workflow on
actual portfolio returns.
"""

import numpy as np

from mpca import Ranks, rolling_validate


def main():
    rng = np.random.default_rng(5)
    p = q = 10
    years = np.repeat(np.arange(1990, 2000), 12)
    T = len(years)
    R = np.sqrt(p) * np.linalg.qr(rng.standard_normal((p, 1)))[0]
    C = np.sqrt(q) * np.linalg.qr(rng.standard_normal((q, 2)))[0]
    F = rng.standard_normal((T, 1, 2))
    X = np.einsum("pi,tij,qj->tpq", R, F, C)
    X += 0.3 * rng.standard_normal(X.shape)

    for n in (2, 5):
        rows, summary = rolling_validate(X, years, n, Ranks(1, 2),
                                         method="mpca_f")
        print(f"bandwidth n={n}: mean MSE {summary['mse_mean']:.4f} "
              f"(sd {summary['mse_sd']:.4f}), "
              f"mean opMax {summary['opmax_mean']:.4f}")
        for year, mse, opmax in rows[:3]:
            print(f"   {year}: mse={mse:.4f} opmax={opmax:.4f}")


if __name__ == "__main__":
    main()
