#!/usr/bin/env python3
"""Regenerate the bundled synthetic `toy-nation` reference dataset.

Ten regions, three with physical storage (one deliberately oversized), a
2018-2050 horizon, a national cap that starts non-binding and tightens
linearly, learning-curve investment costs, and three deliberately marginal
region-tech pairs that only become economic at higher carbon prices.
All values are synthetic and repo-derived.
"""
import json
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "src" / "ccsplan" / "data" / "toy-nation"
T = 33
YEARS = list(range(2018, 2018 + T))

# id: (C0 t, lat, lon, ccs_capacity t)
REGIONS = {
    "aster":   (14e6, 43.5, 141.5, 0.0),
    "birch":   (9e6,  41.0, 140.5, 0.0),
    "cedar":   (11e6, 39.5, 140.0, 4e6),
    "dune":    (7e6,  38.0, 139.5, 0.0),
    "elm":     (12e6, 36.5, 138.0, 0.0),
    "fern":    (8e6,  35.5, 136.5, 0.0),
    "grove":   (13e6, 37.3, 140.9, 16e6),  # oversized storage site
    "heath":   (6e6,  34.5, 133.0, 0.0),
    "iris":    (10e6, 33.5, 131.0, 0.0),
    "juniper": (10e6, 32.5, 130.5, 4e6),
}

# learning-curve baselines; marginal pairs get flat, high investment costs
# tuned so they turn profitable near carbon prices of ~60k/120k/220k yen/t
SOLAR = {
    # id: (g t/GW, potential GW, rp0 or ("flat", rp))
    "aster":   (4.5e5, 4, 1.60e11),
    "birch":   (4.6e5, 3, 1.62e11),
    "cedar":   (4.8e5, 5, 1.58e11),
    "dune":    (5.0e5, 4, 1.61e11),
    "elm":     (5.5e5, 8, 1.55e11),
    "fern":    (5.2e5, 5, ("flat", 3.252e11)),
    "grove":   (5.0e5, 6, 1.59e11),
    "heath":   (5.4e5, 6, ("flat", 4.128e11)),
    "iris":    (5.6e5, 5, 1.57e11),
    "juniper": (5.8e5, 4, 1.56e11),
}
WIND = {
    "aster":   (1.05e6, 7, 2.80e11),
    "birch":   (1.00e6, 5, 2.85e11),
    "cedar":   (9.5e5, 4, 2.90e11),
    "dune":    (9.0e5, 5, ("flat", 7.08e11)),
    "elm":     (8.5e5, 3, 2.95e11),
    "fern":    (8.8e5, 2, 2.92e11),
    "grove":   (9.2e5, 4, 2.88e11),
    "heath":   (8.6e5, 2, 2.94e11),
    "iris":    (9.0e5, 3, 2.91e11),
    "juniper": (9.4e5, 3, 2.87e11),
}
H = {"solar": 1000.0, "wind": 2000.0}
LEARNING = {"solar": 0.98, "wind": 0.985}


def rp_series(entry, tech):
    if isinstance(entry, tuple) and entry[0] == "flat":
        return [entry[1]] * T
    return [entry * LEARNING[tech] ** t for t in range(T)]


def write_series(name, values):
    lines = ["year,value"] + [f"{y},{v:.6g}" for y, v in zip(YEARS, values)]
    (OUT / "series" / f"{name}.csv").write_text("\n".join(lines) + "\n")


def main():
    (OUT / "series").mkdir(parents=True, exist_ok=True)

    cap = [None] * 8 + [9.3e7 - k * (5.3e7 / 24) for k in range(25)]
    glob = {
        "horizon": {"start_year": 2018, "num_years": T},
        "units": {"co2_mass": "t"},
        "cp": {"constant": 10000},
        "ccsp": [12000 - 4000 * t / (T - 1) for t in range(T)],
        "gt": {"constant": 8.1739},
        "cap": cap,
        "sp": {
            "solar": [1.8e7] * 3 + [8e6] * (T - 3),
            "wind": [2.0e7] * 3 + [8e6] * (T - 3),
        },
        "alpha": {"solar": 0.31, "wind": 0.69},
    }
    (OUT / "globals.json").write_text(json.dumps(glob, indent=2) + "\n")

    lines = ["id,C0_tonnes,lat,lon,ccs_capacity_tonnes"]
    for rid, (c0, lat, lon, cc) in REGIONS.items():
        lines.append(f"{rid},{c0:.6g},{lat},{lon},{cc:.6g}")
    (OUT / "regions.csv").write_text("\n".join(lines) + "\n")

    lines = ["region_id,tech,potential_gw,h_gwh_per_gw,rp_series,g_series"]
    for tech, table in (("solar", SOLAR), ("wind", WIND)):
        for rid, (g, pot, rp) in table.items():
            rp_name = f"rp_{tech}_{rid}"
            g_name = f"g_{tech}_{rid}"
            write_series(rp_name, rp_series(rp, tech))
            write_series(g_name, [g] * T)
            lines.append(f"{rid},{tech},{pot},{H[tech]},{rp_name},{g_name}")
    (OUT / "tech.csv").write_text("\n".join(lines) + "\n")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
