import random

import pytest

from helpers import CSV_HEADER, csv_line


@pytest.fixture
def rng():
    return random.Random(20160301)


@pytest.fixture
def write_csv(tmp_path):
    """Write trip lines under the yellow-cab header, return the path"""

    def write(lines, name="trips.csv", header=CSV_HEADER):
        path = tmp_path / name
        body = "\n".join(([header] if header else []) + list(lines)) + "\n"
        path.write_text(body)
        return str(path)

    return write


@pytest.fixture
def routes_csv(write_csv):
    """Small March 2016 trip file with simultaneous trips on two routes"""
    a = ("40.7580", "-73.9855")
    b = ("40.7484", "-73.9857")
    c = ("40.7061", "-74.0087")
    lines = [
        csv_line("2016-03-01 11:01:00", "2016-03-01 11:20:00", *a, *b, "1", "12.50"),
        csv_line("2016-03-01 11:03:00", "2016-03-01 11:25:00", *a, *b, "2", "14.00"),
        csv_line("2016-03-01 11:09:00", "2016-03-01 11:30:00", *a, *b, "1", "13.25"),
        csv_line("2016-03-01 11:12:00", "2016-03-01 11:40:00", *a, *b, "3", "15.00"),
        csv_line("2016-03-01 11:02:00", "2016-03-01 11:50:00", *b, *c, "1", "30.00"),
        csv_line("2016-03-01 11:04:00", "2016-03-01 11:55:00", *b, *c, "1", "31.00"),
        csv_line("2016-03-02 08:00:00", "2016-03-02 08:10:00", *c, *a, "1", "25.00"),
        csv_line("2016-03-02 08:05:00", "2016-03-02 08:06:00", *c, *c, "1", "3.00"),
        csv_line("2016-04-02 09:00:00", "2016-04-02 09:30:00", *a, *c, "2", "28.00"),
    ]
    return write_csv(lines)
