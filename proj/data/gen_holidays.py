"""Regenerates holidays.csv (US federal holidays plus Easter, and a GLOBAL set)."""
import calendar
import csv
import datetime as dt
import sys

from dateutil.easter import easter

YEARS = range(2000, 2036)


def nth_weekday(year, month, weekday, n):
    days = [d for d in calendar.Calendar().itermonthdates(year, month) if d.month == month and d.weekday() == weekday]
    return days[n] if n >= 0 else days[n]


def us(year):
    rows = [
        ("NewYear", dt.date(year, 1, 1), 1, 1),
        ("MartinLutherKingDay", nth_weekday(year, 1, 0, 2), 1, 1),
        ("PresidentsDay", nth_weekday(year, 2, 0, 2), 1, 1),
        ("Easter", easter(year), 2, 1),
        ("MemorialDay", nth_weekday(year, 5, 0, -1), 1, 1),
        ("IndependenceDay", dt.date(year, 7, 4), 1, 1),
        ("LaborDay", nth_weekday(year, 9, 0, 0), 1, 1),
        ("ColumbusDay", nth_weekday(year, 10, 0, 1), 1, 1),
        ("VeteransDay", dt.date(year, 11, 11), 1, 1),
        ("Thanksgiving", nth_weekday(year, 11, 3, 3), 1, 4),
        ("Christmas", dt.date(year, 12, 25), 1, 1),
    ]
    if year >= 2021:
        rows.append(("Juneteenth", dt.date(year, 6, 19), 1, 1))
    return rows


def global_(year):
    return [("NewYear", dt.date(year, 1, 1), 1, 1), ("Christmas", dt.date(year, 12, 25), 1, 1)]


def main(path):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["region", "holiday", "date", "pre_days", "post_days"])
        for region, fn in (("US", us), ("GLOBAL", global_)):
            for year in YEARS:
                for name, date, pre, post in sorted(fn(year), key=lambda r: r[1]):
                    w.writerow([region, name, date.isoformat(), pre, post])


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "holidays.csv")
