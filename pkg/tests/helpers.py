"""Trip and graph builders shared by the test modules"""

from services.ingest import TripRow, build_graph
from services.temporal import parse_instant

# 4-digit grid points around midtown, micro-degrees
BASE_LAT = 40_750_000
BASE_LON = -73_990_000


def trip(pickup, dropoff, src, dst, passengers=1, fare_cents=1000):
    """TripRow from epoch seconds (or timestamp text) and (lat, lon) micro-degree pairs"""
    if isinstance(pickup, str):
        pickup = parse_instant(pickup)
    if isinstance(dropoff, str):
        dropoff = parse_instant(dropoff)
    return TripRow(pickup, dropoff, src[0], src[1], dst[0], dst[1], passengers, fare_cents)


def random_locations(rng, count):
    """Distinct points on the 4-digit grid, spread so 3 and 2 digits merge some"""
    points = set()
    while len(points) < count:
        points.add((BASE_LAT + rng.randrange(-40, 40) * 700, BASE_LON + rng.randrange(-40, 40) * 700))
    return sorted(points)


def random_trips(rng, max_locations=30, max_edges=200, horizon=1000, max_duration=120):
    locations = random_locations(rng, rng.randint(2, max_locations))
    rows = []
    for _ in range(rng.randint(1, max_edges)):
        start = rng.randrange(0, horizon - 1)
        end = min(horizon, start + rng.randint(1, max_duration))
        rows.append(trip(start, end, rng.choice(locations), rng.choice(locations),
                         passengers=rng.randint(0, 6), fare_cents=rng.randint(250, 9000)))
    return rows


def random_graph(rng, partitions=None, **kwargs):
    rows = random_trips(rng, **kwargs)
    return build_graph(rows, 4, partitions or rng.randint(1, 6))


CSV_HEADER = (
    "VendorID,tpep_pickup_datetime,tpep_dropoff_datetime,passenger_count,trip_distance,"
    "pickup_longitude,pickup_latitude,RatecodeID,store_and_fwd_flag,dropoff_longitude,"
    "dropoff_latitude,payment_type,fare_amount"
)


def csv_line(pickup, dropoff, plat, plon, dlat, dlon, passengers="1", fare="10.00"):
    return f"2,{pickup},{dropoff},{passengers},1.2,{plon},{plat},1,N,{dlon},{dlat},1,{fare}"
