#!/usr/bin/env python3
"""Regenerates the synthetic-city fixture under data/fixtures/city.

Eight dense check-in areas (A..H by descending size) are planted in a
Curitiba-sized box together with sparse background check-ins. Municipal
reports are planted around the areas so that the category counts per area
reproduce the problem columns of the site matrix, and clusters C and D hold
84% of the assigned reports. Output is fully determined by the seed.
"""

import csv
import math
import random
from pathlib import Path

R = 6_371_000.0
ORIGIN = (-25.4284, -49.2733)
OUT = Path(__file__).resolve().parent.parent / "data" / "fixtures" / "city"

# name -> (east m, north m, distinct user/venue pairs)
AREAS = {
    "A": (0, 0, 40),
    "B": (2000, 500, 36),
    "C": (-2000, 800, 32),
    "D": (500, 2500, 28),
    "E": (-1500, -2200, 24),
    "F": (2500, -2000, 20),
    "G": (-3500, -500, 16),
    "H": (1200, -4000, 12),
}

STYLES = ["IPA", "APA", "Stout", "Pilsen", "Weiss", "Sour", "Porter", "Red Ale"]

# Report counts per area: (Safety, Noise, StreetBlocking, Traffic, Parking, Health)
REPORT_PLAN = {
    "A": dict(safety=1, noise=1, parking=3),
    "B": dict(safety=1, noise=1, street=1, parking=3),
    "C": dict(safety=15, noise=15, street=20, parking=34),
    "D": dict(safety=15, noise=15, health=20, parking=34),
    "E": dict(safety=1, noise=1, health=1, parking=3),
    "F": dict(safety=1, health=1, parking=3),
    "G": dict(safety=1, health=1, parking=3),
    "H": dict(traffic=1, health=1, parking=3),
}
SUBDIVISIONS = {
    "safety": ["Requesting greater security", "Drugged people on the street"],
    "noise": ["Loud noise at night", "Loud noise at daytime"],
    "street": ["Events blocking streets", "Blocking street with vehicle"],
    "traffic": ["Traffic inspection", "Speed excess"],
    "parking": ["Parking on sidewalk", "Parking at forbidden time"],
    "health": ["Open sewage", "Leptospirosis risk"],
}
SUBJECTS = {
    "safety": "Segurança", "noise": "Perturbação do sossego", "street": "Trânsito",
    "traffic": "Trânsito", "parking": "Estacionamento", "health": "Saúde",
}
IRRELEVANT = ["Tree pruning", "Street lighting", "Pothole repair"]


def offset(east, north, base=ORIGIN):
    lat = base[0] + math.degrees(north / R)
    lon = base[1] + math.degrees(east / (R * math.cos(math.radians(base[0]))))
    return lat, lon


def in_disk(rng, radius):
    r = radius * math.sqrt(rng.random())
    t = rng.random() * 2 * math.pi
    return r * math.cos(t), r * math.sin(t)


def fmt(x):
    return f"{x:.6f}"


def ts(rng, start_day, span_days, zone="-03:00"):
    day = start_day + rng.randrange(span_days)
    y, m, d = day
    return f"{y:04d}-{m:02d}-{d:02d}T{rng.randrange(17, 24):02d}:{rng.randrange(60):02d}:00{zone}"


def random_date(rng, first, last):
    import datetime as dt
    a = dt.date.fromisoformat(first)
    b = dt.date.fromisoformat(last)
    day = a + dt.timedelta(days=rng.randrange((b - a).days + 1))
    return day.isoformat()


def planted_checkins(rng, areas, year_first, year_last, prefix):
    rows = []
    for name, (east, north, pairs) in areas.items():
        venues = []
        for v in range(5):
            dx, dy = in_disk(rng, 55)
            venues.append((f"{prefix}-{name}-{v + 1}", offset(east + dx, north + dy)))
        users = [f"u{name.lower()}{prefix}{i:03d}" for i in range(pairs)]
        for i, user in enumerate(users):
            vid, (lat, lon) = venues[i % len(venues)]
            stamp = random_date(rng, year_first, year_last) + f"T{rng.randrange(17, 24):02d}:00:00Z"
            rows.append([user, vid, rng.choice(STYLES), fmt(lat), fmt(lon), stamp])
            # Heavy users check in again at the same venue later on.
            if i % 4 == 0:
                for _ in range(1 + i % 3):
                    later = random_date(rng, stamp[:10], year_last) + "T23:30:00Z"
                    rows.append([user, vid, rng.choice(STYLES), fmt(lat), fmt(lon), later])
    return rows


def background(rng, count, centers, year_first, year_last, prefix):
    pts = []
    while len(pts) < count:
        e = rng.uniform(-5500, 5500)
        n = rng.uniform(-6000, 4500)
        if any(math.hypot(e - ce, n - cn) < 800 for ce, cn in centers):
            continue
        if any(math.hypot(e - pe, n - pn) < 320 for pe, pn in pts):
            continue
        pts.append((e, n))
    rows = []
    for i, (e, n) in enumerate(pts):
        lat, lon = offset(e, n)
        venue = "" if i % 10 == 0 else f"{prefix}-bg-{i:03d}"
        stamp = random_date(rng, year_first, year_last) + "T20:00:00Z"
        rows.append([f"bg{prefix}{i:03d}", venue, rng.choice(STYLES), fmt(lat), fmt(lon), stamp])
    return rows


def write_csv(path, header, rows, delimiter=","):
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, delimiter=delimiter, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def main():
    rng = random.Random(20170601)
    OUT.mkdir(parents=True, exist_ok=True)
    centers = [(e, n) for e, n, _ in AREAS.values()]

    # 2017 check-ins, canonical column names.
    rows = planted_checkins(rng, AREAS, "2016-06-01", "2017-03-31", "v17")
    rows += background(rng, 60, centers, "2016-06-01", "2017-03-31", "17")
    rows.append(["bad1", "x-1", "", "-25.43", "-49.27", "2016-09-01T20:00:00Z"])
    rows.append(["bad2", "x-2", "", "-25.44", "-49.28", "2016-09-02T20:00:00Z"])
    rows.append(["bad3", "x-3", "IPA", "95.0", "-49.28", "2016-09-03T20:00:00Z"])
    rows.append(["bad4", "x-4", "IPA", "abc", "-49.28", "2016-09-04T20:00:00Z"])
    rows.append(["bad5", "x-5", "IPA", "-25.44", "-49.28", "not-a-date"])
    rng.shuffle(rows)
    write_csv(OUT / "checkins_2017.csv", ["user_id", "venue_id", "beer_style", "lat", "lon", "timestamp"], rows)

    # 2013 check-ins: an export with its own column names and ';' delimiter.
    # Only the H area is dense enough for min_pts=10; area B reaches min_pts=5.
    areas13 = {k: (v[0], v[1], {"H": 12, "B": 6}.get(k, 3)) for k, v in AREAS.items()}
    rows13 = planted_checkins(rng, areas13, "2013-01-01", "2013-12-31", "v13")
    rows13 += background(rng, 30, centers, "2013-01-01", "2013-12-31", "13")
    rng.shuffle(rows13)
    write_csv(OUT / "checkins_2013.csv", ["usuario", "local", "estilo", "latitude", "longitude", "data"], rows13,
              delimiter=";")
    (OUT / "checkins_2013.schema").write_text(
        "# column map for the 2013 export\nformat=csv\ndelimiter=;\n"
        "user_id=usuario\nvenue_id=local\nbeer_style=estilo\nlat=latitude\nlon=longitude\ntimestamp=data\n",
        encoding="utf-8")

    # Reports (Portuguese export column names).
    reports = []
    seq = 1

    def add(kind_or_sub, east, north, day=None, spread=80):
        nonlocal seq
        dx, dy = in_disk(rng, spread)
        lat, lon = offset(east + dx, north + dy)
        if kind_or_sub in SUBDIVISIONS:
            sub = rng.choice(SUBDIVISIONS[kind_or_sub])
            subject = SUBJECTS[kind_or_sub]
        else:
            sub = kind_or_sub
            subject = "Serviços urbanos"
        when = day or random_date(rng, "2016-06-01", "2017-03-31")
        reports.append([f"156-{seq:05d}", "Reclamação", subject, sub, f"{when} {rng.randrange(24):02d}:{rng.randrange(60):02d}",
                        f"Solicitação registrada sobre {sub.lower()}", fmt(lat), fmt(lon)])
        seq += 1

    key_map = {"safety": "safety", "noise": "noise", "street": "street", "traffic": "traffic",
               "parking": "parking", "health": "health"}
    for name, plan in REPORT_PLAN.items():
        east, north, _ = AREAS[name]
        for kind, n in plan.items():
            for _ in range(n):
                add(key_map[kind], east, north)
    # Relevant but outside every buffer.
    far = 0
    while far < 20:
        e = rng.uniform(-5500, 5500)
        n = rng.uniform(-6000, 4500)
        if any(math.hypot(e - ce, n - cn) < 1000 for ce, cn in centers):
            continue
        add(rng.choice(list(SUBDIVISIONS)), e, n, spread=1)
        far += 1
    # Inside buffers but outside the study period.
    for i, name in enumerate("ABCDEFGHAB"):
        east, north, _ = AREAS[name]
        add("parking", east, north, day="2015-11-20" if i % 2 else "2017-06-15")
    # Subdivisions outside the category map.
    for i in range(15):
        east, north, _ = AREAS["ABCDEFGH"[i % 8]]
        add(IRRELEVANT[i % 3], east, north)
    rng.shuffle(reports)
    reports.append(["156-99998", "Reclamação", "Estacionamento", "Parking on sidewalk", "2016-10-01 10:00",
                    "sem coordenadas", "", ""])
    reports.append(["156-99999", "Reclamação", "Trânsito", "", "2016-10-02 11:00", "sem subdivisão",
                    "-25.4284", "-49.2733"])
    write_csv(OUT / "reports.csv",
              ["solicitacao", "tipo", "assunto", "subdivisao", "data", "descricao", "latitude", "longitude"], reports)
    (OUT / "reports.schema").write_text(
        "format=csv\nreport_id=solicitacao\nsubject=assunto\nsubdivision=subdivisao\n"
        "timestamp=data\ncomment_text=descricao\nlat=latitude\nlon=longitude\n", encoding="utf-8")


if __name__ == "__main__":
    main()
