#!/usr/bin/env python3
"""Regenerate the synthetic reference tables and author corpus in this directory.

The files are committed; this script only documents how they were produced.
Group counts are solved so that the count-weighted aggregate of each table
(after suppression handling and dropping AIAN / two-or-more) hits the target
population shares.

    python3 fixtures/generate_fixtures.py
"""

import csv
import os

import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))
WORK = ["asian", "black", "hispanic", "white"]

FAMILY_TARGET = np.array([0.050, 0.124, 0.165, 0.661])
GIVEN_TARGET = np.array([0.063, 0.042, 0.069, 0.826])
FAMILY_TOTAL = 270_000_000
GIVEN_TOTAL = 2_600_000

SYLLABLES = ["BA", "KO", "LI", "MER", "TAN", "RU", "SOL", "VEN", "DA", "NOR",
             "QUI", "PEL", "HAR", "ZU", "MON", "TEL", "GAR", "WIN", "FAL", "YO"]


def parse_cell(cell):
    return 0.0 if cell == "(S)" else float(cell)


def working_dist(raw):
    """raw = dict with keys white, black, api, aian, two, hispanic (strings)."""
    w = {k: parse_cell(v) for k, v in raw.items()}
    total = sum(w.values())
    frac = {k: v / total for k, v in w.items()}
    surv = np.array([frac["api"], frac["black"], frac["hispanic"], frac["white"]])
    return surv / surv.sum()


def make_raw(rng, q, dropped):
    """q: working 4-vector summing to 1; dropped: percentage mass for aian+two."""
    scale = 100.0 - dropped
    cells = {
        "api": q[0] * scale,
        "black": q[1] * scale,
        "hispanic": q[2] * scale,
        "white": q[3] * scale,
    }
    aian = dropped * rng.uniform(0.2, 0.5)
    cells["aian"] = aian
    cells["two"] = dropped - aian
    out = {}
    for k, v in cells.items():
        v = round(v, 2)
        # small cells in published tables are suppressed
        if v < 0.05 and rng.uniform() < 0.6:
            out[k] = "(S)"
        else:
            out[k] = f"{v:.2f}"
    return out


def group_dist(rng, lead, max_lo, max_hi, rest_pref):
    top = rng.uniform(max_lo, max_hi)
    rest = rng.dirichlet(rest_pref)
    q = np.zeros(4)
    others = [i for i in range(4) if i != lead]
    for i, r in zip(others, rest):
        q[i] = (1.0 - top) * r
    q[lead] = top
    return q


def fresh_name(rng, used, prefix=""):
    while True:
        n = prefix + "".join(rng.choice(SYLLABLES, size=rng.integers(2, 4)))
        if n not in used:
            used.add(n)
            return n


def build_table(rng, fixed_rows, groups, target, total, used):
    """fixed_rows: list of (name, count, raw); groups: list of (lead, n, lo, hi, rest_pref)."""
    fixed_mass = np.zeros(4)
    fixed_count = 0
    for _, count, raw in fixed_rows:
        fixed_mass += count * working_dist(raw)
        fixed_count += count

    grouped = []
    masses = np.zeros((4, len(groups)))
    for g, (lead, n, lo, hi, pref) in enumerate(groups):
        rows = []
        for _ in range(n):
            q = group_dist(rng, lead, lo, hi, pref)
            raw = make_raw(rng, q, rng.uniform(0.2, 2.5))
            rel = rng.lognormal(0.0, 1.0)
            rows.append((fresh_name(rng, used), rel, raw))
            masses[:, g] += rel * working_dist(raw)
        grouped.append(rows)

    scale = np.linalg.solve(masses, target * total - fixed_mass)
    assert (scale > 0).all(), scale
    out = list(fixed_rows)
    for g, rows in enumerate(grouped):
        for name, rel, raw in rows:
            out.append((name, int(round(rel * scale[g])), raw))

    agg = sum(c * working_dist(r) for _, c, r in out) / sum(c for _, c, _ in out)
    print("aggregate", np.round(agg, 6), "target", target)
    assert np.abs(agg - target).max() < 5e-5
    out.sort(key=lambda r: -r[1])
    return out


def raw(white, black, api, aian, two, hispanic):
    return dict(white=white, black=black, api=api, aian=aian, two=two, hispanic=hispanic)


LANDMARK_FAMILY = [
    ("RODRIGUEZ", 1_094_924, raw("4.80", "0.50", "0.60", "(S)", "(S)", "94.10")),
    ("LEE", 693_023, raw("36.55", "16.56", "42.92", "0.42", "1.59", "1.96")),
    ("WASHINGTON", 177_386, raw("5.4", "91.6", "0.3", "(S)", "(S)", "2.7")),
]
LANDMARK_GIVEN = [
    ("Juan", 4019, raw("4.53", "0.52", "1.52", "0.02", "0.01", "93.4")),
    ("Doris", 1332, raw("76.72", "13.52", "3.42", "0.01", "0.01", "6.32")),
    ("Andy", 555, raw("53.20", "1.60", "38.80", "0.00", "0.00", "6.40")),
]
OTHER_NAMES = raw("68.83", "8.83", "8.22", "(S)", "(S)", "14.12")

CENSUS_HEADER = ["name", "rank", "count", "prop100k", "cum_prop100k",
                 "pctwhite", "pctblack", "pctapi", "pctaian", "pct2prace", "pcthispanic"]
MORTGAGE_HEADER = ["firstname", "obs", "pcthispanic", "pctwhite", "pctblack",
                   "pctapi", "pctaian", "pct2prace"]


def write_census(path, rows, other=None):
    total = sum(c for _, c, _ in rows)
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(CENSUS_HEADER)
        cum = 0.0
        for rank, (name, count, r) in enumerate(rows, start=1):
            prop = count / total * 100_000
            cum += prop
            w.writerow([name, rank, count, f"{prop:.2f}", f"{cum:.2f}",
                        r["white"], r["black"], r["api"], r["aian"], r["two"], r["hispanic"]])
        if other is not None:
            w.writerow(["ALL OTHER NAMES", 0, 29_312_001, "", "",
                        other["white"], other["black"], other["api"], other["aian"],
                        other["two"], other["hispanic"]])


def write_mortgage(path, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(MORTGAGE_HEADER)
        for name, count, r in rows:
            w.writerow([name.title() if name.isupper() else name, count,
                        r["hispanic"], r["white"], r["black"], r["api"], r["aian"], r["two"]])


def main():
    rng = np.random.default_rng(20221011)
    used = {n for n, _, _ in LANDMARK_FAMILY} | {n.upper() for n, _, _ in LANDMARK_GIVEN}

    write_census(os.path.join(HERE, "landmark_family.csv"), LANDMARK_FAMILY)
    write_mortgage(os.path.join(HERE, "landmark_given.csv"), LANDMARK_GIVEN)

    # lead index, names, max-component range, Dirichlet pref for the rest (other three, in index order)
    family_groups = [
        (0, 40, 0.80, 0.98, [1.0, 1.0, 6.0]),
        (1, 40, 0.40, 0.75, [0.5, 1.5, 8.0]),
        (2, 40, 0.70, 0.96, [0.5, 0.5, 6.0]),
        (3, 80, 0.60, 0.92, [1.0, 3.0, 1.5]),
    ]
    family = build_table(rng, LANDMARK_FAMILY, family_groups, FAMILY_TARGET, FAMILY_TOTAL, used)
    write_census(os.path.join(HERE, "census_family.csv"), family, OTHER_NAMES)

    given_groups = [
        (0, 30, 0.75, 0.97, [0.5, 1.0, 6.0]),
        (1, 30, 0.35, 0.70, [0.3, 0.3, 8.0]),
        (2, 30, 0.70, 0.96, [0.5, 0.5, 6.0]),
        (3, 80, 0.78, 0.97, [0.8, 0.5, 0.7]),
    ]
    given = build_table(rng, LANDMARK_GIVEN, given_groups, GIVEN_TARGET, GIVEN_TOTAL, used)
    write_mortgage(os.path.join(HERE, "mortgage_given.csv"), given)

    # author corpus: latent group, then names drawn by P(name | group)
    latent = np.array([0.245, 0.072, 0.054, 0.594])
    latent = latent / latent.sum()
    fam_names = [n for n, _, _ in family]
    fam_w = np.array([[c * working_dist(r)[k] for n, c, r in family] for k in range(4)])
    giv_names = [n for n, _, _ in given]
    giv_w = np.array([[c * working_dist(r)[k] for n, c, r in given] for k in range(4)])
    with open(os.path.join(HERE, "authors.csv"), "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["author_id", "first_name", "last_name"])
        for i in range(2000):
            k = rng.choice(4, p=latent)
            if rng.uniform() < 0.15:
                fam = fresh_name(rng, used, "ZY").title()
            else:
                fam = fam_names[rng.choice(len(fam_names), p=fam_w[k] / fam_w[k].sum())].title()
            u = rng.uniform()
            if u < 0.02:
                giv = ""
            elif u < 0.07:
                giv = fresh_name(rng, used, "QX").title()
            else:
                giv = giv_names[rng.choice(len(giv_names), p=giv_w[k] / giv_w[k].sum())]
                giv = giv.title()
            w.writerow([f"A{i:05d}", giv, fam])


if __name__ == "__main__":
    main()
