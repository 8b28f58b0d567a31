#!/usr/bin/env python3
"""Write data/elo/elo{2010,2014,2018}.csv from approximate ratings."""
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent

BASE = {
    "Albania": 1560, "Algeria": 1600, "Angola": 1500, "Argentina": 1980,
    "Armenia": 1480, "Australia": 1720, "Austria": 1650, "Bahrain": 1520,
    "Belarus": 1500, "Belgium": 1800, "Belize": 1100, "Benin": 1400,
    "Bolivia": 1580, "Bosnia and Herzegovina": 1720, "Botswana": 1350,
    "Brazil": 2100, "Bulgaria": 1600, "Burkina Faso": 1500, "Cameroon": 1650,
    "Canada": 1550, "Cape Verde": 1480, "Chile": 1850, "China": 1570,
    "Colombia": 1880, "Congo": 1420, "Costa Rica": 1720, "Croatia": 1850,
    "Cuba": 1300, "Curacao": 1250, "Czech Republic": 1750, "DR Congo": 1500,
    "Denmark": 1790, "Ecuador": 1780, "Egypt": 1650, "El Salvador": 1400,
    "England": 1930, "Equatorial Guinea": 1380, "Ethiopia": 1300,
    "Fiji": 1150, "Finland": 1550, "France": 1950, "French Guiana": 1200,
    "Gabon": 1480, "Georgia": 1480, "Germany": 2050, "Ghana": 1680,
    "Greece": 1720, "Grenada": 1050, "Guadeloupe": 1300, "Guatemala": 1400,
    "Guinea": 1470, "Guinea-Bissau": 1250, "Haiti": 1420, "Honduras": 1620,
    "Hungary": 1600, "Iceland": 1700, "India": 1150, "Indonesia": 1250,
    "Iran": 1760, "Iraq": 1550, "Italy": 1900, "Ivory Coast": 1740,
    "Jamaica": 1520, "Japan": 1760, "Jordan": 1520, "Kazakhstan": 1350,
    "Kosovo": 1350, "Kuwait": 1420, "Kyrgyzstan": 1150, "Latvia": 1350,
    "Libya": 1400, "Liechtenstein": 1150, "Lithuania": 1400,
    "Luxembourg": 1250, "Macedonia": 1450, "Malawi": 1320, "Malaysia": 1250,
    "Mali": 1550, "Martinique": 1300, "Mexico": 1860, "Moldova": 1300,
    "Montenegro": 1580, "Morocco": 1650, "Mozambique": 1300, "Myanmar": 1100,
    "Namibia": 1250, "Netherlands": 1960, "New Caledonia": 1200,
    "New Zealand": 1600, "Nicaragua": 1150, "Niger": 1250, "Nigeria": 1680,
    "North Korea": 1650, "Northern Ireland": 1550, "Norway": 1680,
    "Oman": 1480, "Palestine": 1250, "Panama": 1600, "Paraguay": 1750,
    "Peru": 1760, "Poland": 1770, "Portugal": 1940, "Qatar": 1450,
    "Republic of Ireland": 1720, "Romania": 1650, "Russia": 1760,
    "San Marino": 900, "Saudi Arabia": 1580, "Scotland": 1640,
    "Senegal": 1700, "Serbia": 1760, "Slovakia": 1690, "Slovenia": 1680,
    "South Africa": 1550, "South Korea": 1760, "Spain": 2060, "Sudan": 1350,
    "Sweden": 1790, "Switzerland": 1820, "Syria": 1450, "Tahiti": 1100,
    "Thailand": 1350, "Togo": 1400, "Trinidad and Tobago": 1450,
    "Tunisia": 1620, "Turkey": 1720, "Turkmenistan": 1250, "Uganda": 1400,
    "Ukraine": 1740, "United Arab Emirates": 1500, "United States": 1780,
    "Uruguay": 1880, "Uzbekistan": 1550, "Vanuatu": 1100, "Venezuela": 1550,
    "Vietnam": 1250, "Wales": 1650, "Zambia": 1550, "Zimbabwe": 1350,
}

YEAR = {
    2010: ("2010-06-11", {
        "Brazil": 2087, "Spain": 2085, "Netherlands": 2016, "England": 1975,
        "Germany": 1929, "Argentina": 1911, "Italy": 1882, "Portugal": 1889,
        "France": 1838, "Chile": 1841, "Uruguay": 1816, "Mexico": 1830,
        "Croatia": 1845, "Russia": 1838, "Serbia": 1818, "United States": 1800,
        "Paraguay": 1793, "Ivory Coast": 1786, "Australia": 1786,
        "Switzerland": 1762, "Greece": 1750, "Denmark": 1772,
        "Cameroon": 1720, "Ghana": 1724, "Nigeria": 1713,
        "South Korea": 1735, "Japan": 1749, "Slovenia": 1683,
        "Slovakia": 1695, "Algeria": 1615, "Honduras": 1650,
        "South Africa": 1606, "New Zealand": 1579, "North Korea": 1589,
    }),
    2014: ("2014-06-11", {
        "Brazil": 2113, "Spain": 2086, "Germany": 2046, "Argentina": 1989,
        "Netherlands": 1959, "Colombia": 1912, "Uruguay": 1890,
        "England": 1909, "Chile": 1883, "Italy": 1890, "Portugal": 1902,
        "France": 1869, "Ecuador": 1837, "Mexico": 1816, "Belgium": 1849,
        "Switzerland": 1833, "Croatia": 1817, "Russia": 1812,
        "United States": 1818, "Bosnia and Herzegovina": 1781,
        "Ivory Coast": 1774, "Greece": 1796, "Costa Rica": 1722,
        "Japan": 1723, "South Korea": 1690, "Iran": 1726, "Ghana": 1720,
        "Nigeria": 1716, "Algeria": 1619, "Honduras": 1675,
        "Cameroon": 1617, "Australia": 1711,
    }),
    2018: ("2018-03-28", {
        "Brazil": 2131, "Germany": 2092, "Spain": 2048, "Argentina": 1985,
        "France": 1984, "Portugal": 1975, "Belgium": 1932, "England": 1941,
        "Colombia": 1928, "Uruguay": 1893, "Croatia": 1853, "Peru": 1906,
        "Switzerland": 1879, "Mexico": 1859, "Denmark": 1843,
        "Poland": 1831, "Sweden": 1796, "Russia": 1685, "Iran": 1793,
        "Serbia": 1770, "Senegal": 1747, "Iceland": 1787, "Japan": 1684,
        "Australia": 1714, "Costa Rica": 1745, "Morocco": 1733,
        "Nigeria": 1699, "Egypt": 1646, "South Korea": 1714,
        "Tunisia": 1659, "Panama": 1669, "Saudi Arabia": 1591,
    }),
}


def main():
    dest = ROOT / "data" / "elo"
    dest.mkdir(parents=True, exist_ok=True)
    for year, (as_of, top) in YEAR.items():
        unknown = set(top) - set(BASE)
        assert not unknown, unknown
        table = {**BASE, **top}
        with open(dest / f"elo{year}.csv", "w") as fh:
            fh.write(f"# as_of={as_of}\n")
            fh.write("# approximate ratings reconstructed from memory\n")
            fh.write("team,rating\n")
            for team in sorted(table):
                fh.write(f"{team},{table[team]}\n")


if __name__ == "__main__":
    main()
