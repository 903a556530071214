#!/usr/bin/env python3
"""Regenerates the synthetic fixtures under config/ and data/experiment/.

Deterministic: the same seed always produces byte-identical files.
"""

import csv
import json
import math
import random
from datetime import datetime, timedelta, timezone
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
R = 6371000.0

LONDON = [
    ("Trafalgar Square", 51.5080, -0.1281),
    ("Strand", 51.5117, -0.1200),
    ("Shoreditch High Street", 51.5233, -0.0754),
    ("Kings Cross St Pancras", 51.5308, -0.1238),
    ("Paddington Station", 51.5154, -0.1755),
    ("Heathrow Terminal 5", 51.4700, -0.4543),
    ("Oxford Circus", 51.5152, -0.1418),
    ("Piccadilly Circus", 51.5100, -0.1347),
    ("Liverpool Street Station", 51.5178, -0.0823),
    ("London Bridge", 51.5055, -0.0860),
    ("Waterloo Station", 51.5031, -0.1132),
    ("Victoria Station", 51.4952, -0.1441),
    ("Camden Town", 51.5392, -0.1426),
    ("Covent Garden", 51.5117, -0.1240),
    ("Westminster Bridge", 51.5008, -0.1217),
    ("Soho Square", 51.5154, -0.1320),
]

NEW_YORK = [
    ("Times Square", 40.7580, -73.9855),
    ("Grand Central Terminal", 40.7527, -73.9772),
    ("JFK Airport Terminal 4", 40.6441, -73.7823),
    ("LaGuardia Airport", 40.7769, -73.8740),
    ("Wall Street", 40.7060, -74.0088),
    ("Central Park South", 40.7651, -73.9760),
    ("Union Square", 40.7359, -73.9911),
    ("Brooklyn Bridge Park", 40.7003, -73.9967),
    ("Penn Station", 40.7506, -73.9935),
    ("Columbus Circle", 40.7681, -73.9819),
    ("Harlem 125th Street", 40.8075, -73.9465),
    ("Williamsburg Bedford Ave", 40.7173, -73.9567),
]


def haversine(a, b):
    la1, lo1, la2, lo2 = map(math.radians, (a[0], a[1], b[0], b[1]))
    h = math.sin((la2 - la1) / 2) ** 2 + math.cos(la1) * math.cos(la2) * math.sin((lo2 - lo1) / 2) ** 2
    return 2 * R * math.asin(min(1.0, math.sqrt(h)))


def offset(p, north_m, east_m):
    lat = p[0] + math.degrees(north_m / R)
    lng = p[1] + math.degrees(east_m / (R * math.cos(math.radians(p[0]))))
    return (lat, lng)


def route_segments(rng, a, b):
    total = haversine(a, b) * rng.uniform(1.2, 1.45)
    n = rng.randint(2, 6)
    cuts = sorted(rng.uniform(0, 1) for _ in range(n - 1))
    parts = [hi - lo for lo, hi in zip([0.0] + cuts, cuts + [1.0])]
    segs = []
    for frac in parts:
        length = round(total * frac, 1)
        if length < 1:
            continue
        speed = rng.choice([rng.uniform(2.0, 5.0), rng.uniform(5.5, 13.0)])
        segs.append({"length_m": length, "duration_s": round(length / speed, 1)})
        if rng.random() < 0.3:
            segs.append({"length_m": 0, "duration_s": rng.randint(20, 120)})
    return segs


def pt(p):
    return {"lat": p[0], "lng": p[1]}


def write_json(path, doc):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=1) + "\n")


def write_gazetteer(path, entries):
    with path.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["name", "lat", "lng"])
        for name, lat, lng in entries:
            w.writerow([name, f"{lat:.4f}", f"{lng:.4f}"])


def city_routes(rng, places, extra=()):
    routes = list(extra)
    for i, (_, la, lo) in enumerate(places):
        for j, (_, lb, lob) in enumerate(places):
            if i != j:
                routes.append({"origin": pt((la, lo)), "destination": pt((lb, lob)),
                               "segments": route_segments(rng, (la, lo), (lb, lob))})
    return routes


def nyc_trips(rng):
    """Historic trips around a subset of gazetteer pairs (others fall back to the meter)."""
    rows = []
    start = datetime(2015, 3, 1, tzinfo=timezone.utc)
    pairs = [(i, j) for i in range(len(NEW_YORK)) for j in range(len(NEW_YORK)) if i != j]
    rng.shuffle(pairs)
    for i, j in pairs[: len(pairs) // 2]:
        a = NEW_YORK[i][1:]
        b = NEW_YORK[j][1:]
        base = 2.5 + 0.5 * haversine(a, b) * 1.3 / 321.868
        for _ in range(rng.randint(3, 12)):
            pa = offset(a, rng.uniform(-60, 60), rng.uniform(-60, 60))
            pb = offset(b, rng.uniform(-60, 60), rng.uniform(-60, 60))
            fare = max(2.5, base * rng.uniform(0.85, 1.2))
            when = start + timedelta(minutes=rng.randint(0, 60 * 24 * 60))
            rows.append([when.strftime("%Y-%m-%dT%H:%M:%SZ"), f"{pa[0]:.6f}", f"{pa[1]:.6f}",
                         f"{pb[0]:.6f}", f"{pb[1]:.6f}", f"{fare:.2f}", f"{fare * 1.15:.2f}"])
    rows.sort()
    return rows


# --- experiment ---------------------------------------------------------------

CENTRE = (51.5115, -0.1250)

# Outcome plan: 18 metered wins, 4 ties, 7 losses, listed from the most
# central journey outwards. Wins dominate the dense centre so the cumulative
# win fraction has a rising tail.
PLAN = ("W" * 10 + "L" + "W" * 6 + "TWTTLWLTLLLL")
PLAN = [{"W": "win", "T": "tie", "L": "loss"}[c] for c in PLAN]
assert (PLAN.count("win"), PLAN.count("tie"), PLAN.count("loss")) == (18, 4, 7)
TARGET_METERED_S = 24464
TARGET_FLEX_S = 28432


def experiment(rng):
    places = []
    for k in range(700):
        r = abs(rng.gauss(0, 1500))
        t = rng.uniform(0, 2 * math.pi)
        places.append((f"Venue {k + 1}", *offset(CENTRE, r * math.sin(t), r * math.cos(t))))
    for k in range(120):
        places.append((f"Outer venue {k + 1}",
                       *offset(CENTRE, rng.uniform(-7000, 7000), rng.uniform(-7000, 7000))))

    # metered and flex durations per outcome, then exact totals
    durations = []
    for outcome in PLAN:
        m = rng.randint(600, 1000)
        if outcome == "win":
            f = m + rng.randint(150, 420)
        elif outcome == "tie":
            f = m + rng.randint(-50, 50)
        else:
            f = m - rng.randint(90, 200)
        durations.append([m, f])

    def fix(index, target, slack_ok):
        diff = target - sum(d[index] for d in durations)
        k = 0
        while diff != 0:
            d = durations[k % len(durations)]
            step = max(-40, min(40, diff))
            d[index] += step
            if slack_ok(PLAN[k % len(durations)], d):
                diff -= step
            else:
                d[index] -= step
            k += 1

    def consistent(outcome, d):
        delta = d[1] - d[0]
        if outcome == "win":
            return delta > 60 + 30
        if outcome == "tie":
            return abs(delta) <= 60 - 5
        return delta < -(60 + 30)

    fix(0, TARGET_METERED_S, consistent)
    fix(1, TARGET_FLEX_S, consistent)
    assert sum(d[0] for d in durations) == TARGET_METERED_S
    assert sum(d[1] for d in durations) == TARGET_FLEX_S
    assert all(consistent(o, d) for o, d in zip(PLAN, durations))

    rides = []
    tracks = []
    day = datetime(2016, 2, 8, 9, 0, tzinfo=timezone.utc)
    order = list(range(len(PLAN)))
    rng.shuffle(order)
    for n, k in enumerate(order):
        outcome = PLAN[k]
        jid = f"J{n + 1:02d}"
        radius = 150 + k * 190  # journeys circle the centre at a fixed distance
        phase = rng.uniform(0, 2 * math.pi)
        length = rng.uniform(2500, 5000)
        start = day + timedelta(days=n // 3, hours=(n % 3) * 3)
        m_s, f_s = durations[k]
        base_price = 6.0 + length / 1000 * 2.6
        for provider, dur, price, bend in (("black_cab", m_s, base_price * rng.uniform(1.0, 1.35), 1),
                                           ("uber_x", f_s, base_price * rng.uniform(0.7, 1.0), -1)):
            t0 = start + timedelta(minutes=rng.randint(0, 4))
            t1 = t0 + timedelta(seconds=dur)
            est = price * rng.uniform(0.85, 1.15)
            rides.append([jid, provider, t0.strftime("%Y-%m-%dT%H:%M:%SZ"),
                          t1.strftime("%Y-%m-%dT%H:%M:%SZ"), f"{price:.2f}", f"{est:.2f}", "GBP"])
            steps = max(2, dur // 30)
            for s in range(steps + 1):
                u = s / steps
                r = radius + bend * math.sin(math.pi * u) * min(60, radius / 3)
                angle = phase + length * u / radius
                lat, lng = offset(CENTRE, r * math.sin(angle), r * math.cos(angle))
                when = t0 + timedelta(seconds=round(dur * u))
                tracks.append([jid, provider, when.strftime("%Y-%m-%dT%H:%M:%SZ"),
                               f"{lat:.6f}", f"{lng:.6f}"])
    rides.sort()
    tracks.sort(key=lambda r: (r[0], r[1], r[2]))
    return places, rides, tracks


def write_csv(path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def main():
    rng = random.Random(20160208)
    cfg = ROOT / "config"
    write_gazetteer(cfg / "gazetteer" / "london.csv", LONDON)
    write_gazetteer(cfg / "gazetteer" / "new_york.csv", NEW_YORK)

    reference = {"origin": pt((51.50, -0.12)), "destination": pt((51.51, -0.10)),
                 "segments": [{"length_m": 800, "duration_s": 120},
                              {"length_m": 1200, "duration_s": 240}]}
    write_json(cfg / "routes" / "london.json", city_routes(rng, LONDON, [reference]))
    write_json(cfg / "routes" / "new_york.json", city_routes(rng, NEW_YORK))
    write_csv(cfg / "trips" / "new_york.csv",
              ["pickup_datetime", "pickup_lat", "pickup_lng", "dropoff_lat", "dropoff_lng",
               "fare_amount", "total_amount"], nyc_trips(rng))

    places, rides, tracks = experiment(rng)
    exp = ROOT / "data" / "experiment"
    write_csv(exp / "places.csv", ["name", "lat", "lng"],
              [[n, f"{a:.6f}", f"{b:.6f}"] for n, a, b in places])
    write_csv(exp / "rides.csv", ["journey_id", "provider", "start", "end", "actual_price",
                                  "estimated_price", "currency"], rides)
    write_csv(exp / "trajectories.csv", ["journey_id", "provider", "timestamp", "lat", "lng"],
              tracks)


if __name__ == "__main__":
    main()
