#!/usr/bin/env python3
"""Regenerates the bundled New York fixture under data/.

Attribute values are synthetic, drawn around a per-county urbanization score,
except Employed, Unemployed, FarmLand and Target for the first 14 counties of
2000, which are transcribed from the published data snapshot. County polygons
are grid cells inside the state's bounding box, not real boundaries.

Usage: scripts/make_ny_fixture.py [out_dir]
"""

import csv
import json
import math
import random
import struct
import sys
from pathlib import Path

COUNTIES = [
    "Albany", "Allegany", "Bronx", "Broome", "Cattaraugus", "Cayuga", "Chautauqua", "Chemung",
    "Chenango", "Clinton", "Columbia", "Cortland", "Delaware", "Dutchess", "Erie", "Essex",
    "Franklin", "Fulton", "Genesee", "Greene", "Hamilton", "Herkimer", "Jefferson", "Kings",
    "Lewis", "Livingston", "Madison", "Monroe", "Montgomery", "Nassau", "New York", "Niagara",
    "Oneida", "Onondaga", "Ontario", "Orange", "Orleans", "Oswego", "Otsego", "Putnam",
    "Queens", "Rensselaer", "Richmond", "Rockland", "St. Lawrence", "Saratoga", "Schenectady",
    "Schoharie", "Schuyler", "Seneca", "Steuben", "Suffolk", "Sullivan", "Tioga", "Tompkins",
    "Ulster", "Warren", "Washington", "Wayne", "Westchester", "Wyoming", "Yates",
]

SPRAWL_2000 = {
    "Albany", "Bronx", "Erie", "Kings", "Monroe", "Nassau", "New York", "Queens", "Richmond",
    "Rockland", "Schenectady", "Suffolk", "Westchester",
}
NEW_IN_2010 = {"Putnam", "Orange", "Dutchess", "Saratoga", "Onondaga"}
SPRAWL_2010 = SPRAWL_2000 | NEW_IN_2010

# Employed, Unemployed, FarmLand, Target for the first 14 counties (2000).
SNAPSHOT = [
    (50.05, 1.77, 84.8, "Y"), (43.46, 2.2, 149.2, "N"), (33.9, 2.61, 0.0, "Y"),
    (47.27, 1.8, 102.4, "N"), (46.81, 2.26, 114.0, "N"), (47.46, 1.95, 121.8, "N"),
    (46.8, 1.93, 82.8, "N"), (45.02, 1.98, 88.0, "N"), (45.72, 1.95, 131.2, "N"),
    (46.06, 2.25, 147.0, "N"), (48.34, 1.74, 110.6, "N"), (47.53, 2.06, 135.2, "N"),
    (44.32, 1.87, 171.2, "N"), (48.15, 1.57, 56.8, "N"),
]

ATTRIBUTES = [
    ("PopulationDensity", "persons per square mile"),
    ("TotalPopulation", "persons"),
    ("TotalPersonalIncome", "thousand dollars"),
    ("Income", "dollars per capita"),
    ("Employed", "percent of population"),
    ("Unemployed", "percent of population"),
    ("FarmLand", "thousand acres"),
    ("HousingUnits", "units"),
    ("MeanTravelTime", "minutes"),
    ("TotalAccident", "reported accidents"),
    ("PublicSupply", "percent of households"),
    ("Poverty", "percent of population"),
    ("BirthRate", "births per 1000 population"),
    ("BirthsPerDeath", "ratio"),
    ("Education", "percent with bachelor degree"),
    ("GasolineStations", "stations"),
    ("TruckTransport", "workers"),
    ("TransitUse", "percent of commuters"),
    ("ElectricHeating", "housing units"),
    ("Asians", "percent of population"),
    ("WhitePeople", "percent of population"),
    ("ForeignBorn", "percent of population"),
    ("MedianAge", "years"),
    ("CarCommuters", "percent of commuters"),
    ("VacantHousing", "percent of housing units"),
    ("LandArea", "square miles"),
    ("NewBuildingPermits", "permits"),
]

# Cells left blank in the 2000 table.
BLANKS_2000 = {("Hamilton", "NewBuildingPermits"), ("Schuyler", "TransitUse")}


def fips(index):
    return f"36{2 * index + 1:03d}"


def urban_scores(rng):
    scores = {}
    for name in COUNTIES:
        if name in SPRAWL_2000:
            scores[name] = rng.uniform(0.66, 0.98)
        elif name in NEW_IN_2010:
            scores[name] = rng.uniform(0.50, 0.60)
        else:
            scores[name] = rng.uniform(0.02, 0.52)
    for name in ("New York", "Kings", "Bronx", "Queens"):
        scores[name] = max(scores[name], 0.95)
    return scores


def county_values(rng, u):
    def jitter(scale):
        return rng.gauss(0.0, scale)

    density = math.exp(3.2 + 7.0 * u + jitter(0.45))
    area = math.exp(7.4 - 3.6 * u + jitter(0.35))
    population = density * area
    income = 17000 + 26000 * u + jitter(6000)
    housing = population / 2.4 * math.exp(jitter(0.45))

    def per_capita(rate, spread):
        return population * rate * math.exp(jitter(spread))

    v = {
        "PopulationDensity": density,
        "TotalPopulation": population,
        "Income": income,
        "TotalPersonalIncome": population * income / 1000.0,
        "Employed": 44.0 + 3.0 * u + jitter(2.5),
        "Unemployed": 2.2 - 0.3 * u + jitter(0.4),
        "FarmLand": max(0.0, 175.0 * (1.0 - u) + jitter(45.0)),
        "HousingUnits": housing,
        "MeanTravelTime": 18.0 + 12.0 * u + jitter(5.0),
        "TotalAccident": per_capita(0.018, 0.9),
        "PublicSupply": min(100.0, 45.0 + 35.0 * u + jitter(14.0)),
        "Poverty": 9.0 + 6.0 * u + jitter(4.0),
        "BirthRate": 10.0 + 5.5 * u + jitter(1.2),
        "BirthsPerDeath": 0.8 + 0.8 * u + jitter(0.35),
        "Education": 14.0 + 16.0 * u + jitter(7.0),
        "GasolineStations": per_capita(1 / 2600.0, 0.5),
        "TruckTransport": per_capita(0.012, 1.0),
        "TransitUse": math.exp(-0.5 + 4.2 * u + jitter(0.8)),
        "ElectricHeating": housing * 0.09 * math.exp(jitter(0.9)),
        "Asians": math.exp(-0.7 + 3.2 * u + jitter(0.4)),
        "WhitePeople": min(99.0, 92.0 - 30.0 * u + jitter(8.0)),
        "ForeignBorn": math.exp(0.8 + 2.0 * u + jitter(0.7)),
        "MedianAge": 40.0 - 2.0 * u + jitter(2.5),
        "CarCommuters": 92.0 - 25.0 * u ** 2 + jitter(5.0),
        "VacantHousing": max(2.0, 18.0 - 8.0 * u + jitter(5.0)),
        "LandArea": area,
        "NewBuildingPermits": per_capita(0.004, 1.0),
    }
    return v


def grow(rng, values, name):
    out = dict(values)
    pop_growth = 1.0 + rng.uniform(-0.03, 0.06)
    if name in NEW_IN_2010:
        pop_growth = 1.0 + rng.uniform(0.08, 0.14)
    for key in ("PopulationDensity", "TotalPopulation", "HousingUnits", "TotalAccident",
                "GasolineStations", "TruckTransport", "ElectricHeating", "NewBuildingPermits"):
        out[key] = values[key] * pop_growth * (1.0 + rng.uniform(-0.02, 0.02))
    out["Income"] = values["Income"] * (1.0 + rng.uniform(0.15, 0.25))
    out["TotalPersonalIncome"] = out["TotalPopulation"] * out["Income"] / 1000.0
    out["FarmLand"] = values["FarmLand"] * (1.0 - rng.uniform(0.0, 0.12))
    for key in ("Asians", "ForeignBorn", "TransitUse"):
        out[key] = values[key] * (1.0 + rng.uniform(0.05, 0.25))
    if name in NEW_IN_2010:
        out["PopulationDensity"] *= 1.6
        out["NewBuildingPermits"] *= 1.8
    return out


def rounded(key, value):
    if key in ("TotalPopulation", "TotalPersonalIncome", "HousingUnits", "TotalAccident",
               "GasolineStations", "TruckTransport", "ElectricHeating", "NewBuildingPermits"):
        return str(int(round(value)))
    if key in ("Income",):
        return str(int(round(value)))
    return f"{value:.2f}"


def write_table(path, rows, year):
    header = ["GEOID", "County"] + [a for a, _ in ATTRIBUTES] + ["Target"]
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for i, name in enumerate(COUNTIES):
            values = rows[name]
            cells = [fips(i), name]
            for attr, _ in ATTRIBUTES:
                if year == 2000 and (name, attr) in BLANKS_2000:
                    cells.append("")
                else:
                    cells.append(rounded(attr, values[attr]))
            cells.append(values["Target"])
            w.writerow(cells)


def write_labels(path, labels):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["GEOID", "Sprawl"])
        for i, name in enumerate(COUNTIES):
            w.writerow([fips(i), labels[name]])


# Shapefile writing ---------------------------------------------------------

def cell_rings(index):
    cols = 8
    lon0, lat0 = -79.76, 40.50
    width, height = 0.98, 0.55
    row, col = divmod(index, cols)
    x0 = lon0 + col * width
    y0 = lat0 + row * height
    x1, y1 = x0 + width * 0.96, y0 + height * 0.96
    # Clockwise exterior, as shapefiles store it.
    outer = [(x0, y0), (x0, y1), (x1, y1), (x1, y0), (x0, y0)]
    rings = [outer]
    name = COUNTIES[index]
    if name == "Suffolk":
        # A second part off the east end.
        rings.append([(x1 + 0.005, y0), (x1 + 0.005, y0 + 0.1), (x1 + 0.015, y0 + 0.1),
                      (x1 + 0.015, y0), (x1 + 0.005, y0)])
    if name == "Hamilton":
        # A lake: counterclockwise hole.
        cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
        rings.append([(cx - 0.1, cy - 0.05), (cx + 0.1, cy - 0.05), (cx + 0.1, cy + 0.05),
                      (cx - 0.1, cy + 0.05), (cx - 0.1, cy - 0.05)])
    return rings


def polygon_record(rings):
    points = [p for ring in rings for p in ring]
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    body = struct.pack("<i4d2i", 5, min(xs), min(ys), max(xs), max(ys), len(rings), len(points))
    start = 0
    for ring in rings:
        body += struct.pack("<i", start)
        start += len(ring)
    for x, y in points:
        body += struct.pack("<2d", x, y)
    return body, (min(xs), min(ys), max(xs), max(ys))


def write_shapefile(path):
    records = b""
    bounds = None
    for i in range(len(COUNTIES)):
        body, bbox = polygon_record(cell_rings(i))
        records += struct.pack(">2i", i + 1, len(body) // 2) + body
        bounds = bbox if bounds is None else (min(bounds[0], bbox[0]), min(bounds[1], bbox[1]),
                                              max(bounds[2], bbox[2]), max(bounds[3], bbox[3]))
    total = 100 + len(records)
    header = struct.pack(">7i", 9994, 0, 0, 0, 0, 0, total // 2)
    header += struct.pack("<2i", 1000, 5)
    header += struct.pack("<8d", bounds[0], bounds[1], bounds[2], bounds[3], 0, 0, 0, 0)
    Path(path).write_bytes(header + records)


def write_dbf(path, land_areas):
    fields = [("GEOID", "C", 5, 0), ("NAME", "C", 20, 0), ("ALAND", "N", 14, 0)]
    record_len = 1 + sum(f[2] for f in fields)
    header_len = 32 + 32 * len(fields) + 1
    out = struct.pack("<4BIHH20x", 3, 124, 1, 1, len(COUNTIES), header_len, record_len)
    for name, kind, length, decimals in fields:
        out += name.encode("ascii").ljust(11, b"\0") + kind.encode("ascii") + b"\0" * 4
        out += bytes([length, decimals]) + b"\0" * 14
    out += b"\r"
    for i, county in enumerate(COUNTIES):
        out += b" "
        out += fips(i).encode("ascii").ljust(5)
        out += county.encode("ascii").ljust(20)
        out += str(int(land_areas[county])).encode("ascii").rjust(14)
    out += b"\x1a"
    Path(path).write_bytes(out)


def main():
    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data"
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(20100401)
    scores = urban_scores(rng)

    year2000, year2010 = {}, {}
    for i, name in enumerate(COUNTIES):
        v = county_values(rng, scores[name])
        if i < len(SNAPSHOT):
            v["Employed"], v["Unemployed"], v["FarmLand"], _ = SNAPSHOT[i]
        v["Target"] = "Y" if name in SPRAWL_2000 else "N"
        year2000[name] = v
        g = grow(rng, v, name)
        g["Target"] = "Y" if name in SPRAWL_2010 else "N"
        year2010[name] = g

    for i, name in enumerate(COUNTIES[: len(SNAPSHOT)]):
        assert year2000[name]["Target"] == SNAPSHOT[i][3], name

    write_table(out_dir / "ny_2000.csv", year2000, 2000)
    write_table(out_dir / "ny_2010.csv", year2010, 2010)
    write_labels(out_dir / "ny_labels_2000.csv", {n: year2000[n]["Target"] for n in COUNTIES})
    write_labels(out_dir / "ny_labels_2010.csv", {n: year2010[n]["Target"] for n in COUNTIES})
    write_shapefile(out_dir / "ny_counties.shp")
    write_dbf(out_dir / "ny_counties.dbf", {n: year2000[n]["LandArea"] * 2589988 for n in COUNTIES})
    (out_dir / "units.json").write_text(json.dumps(dict(ATTRIBUTES), indent=2) + "\n")


if __name__ == "__main__":
    main()
