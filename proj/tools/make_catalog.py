#!/usr/bin/env python3
"""Regenerate data/catalog.json from published mean-element tables.

Planets: JPL "Approximate Positions of the Planets", Table 1 (valid 1800-2050),
elements at J2000.0 with rates per Julian century (a in AU, angles in degrees:
a, e, I, L, long.peri, long.node). Earth uses the Earth-Moon barycenter row.

67P/Churyumov-Gerasimenko: osculating elements at MJD 52504.23754 as used by
the GTOP Rosetta benchmark.

10302 (1989 ML): see NOTE below.
"""

import json
import math
import pathlib

AU = 1.495978707e8
MU_SUN = 1.3271244004127942e11
J2000_MJD2000 = 0.5  # JD 2451545.0
CENTURY = 36525.0
DEG = math.pi / 180.0

# name: (elements, rates per century)
JPL_TABLE1 = {
    "Mercury": ((0.38709927, 0.20563593, 7.00497902, 252.25032350, 77.45779628, 48.33076593),
                (0.00000037, 0.00001906, -0.00594749, 149472.67411175, 0.16047689, -0.12534081)),
    "Venus": ((0.72333566, 0.00677672, 3.39467605, 181.97909950, 131.60246718, 76.67984255),
              (0.00000390, -0.00004107, -0.00078890, 58517.81538729, 0.00268329, -0.27769418)),
    "Earth": ((1.00000261, 0.01671123, -0.00001531, 100.46457166, 102.93768193, 0.0),
              (0.00000562, -0.00004392, -0.01294668, 35999.37244981, 0.32327364, 0.0)),
    "Mars": ((1.52371034, 0.09339410, 1.84969142, -4.55343205, -23.94362959, 49.55953891),
             (0.00001847, 0.00007882, -0.00813131, 19140.30268499, 0.44441088, -0.29257343)),
    "Jupiter": ((5.20288700, 0.04838624, 1.30439695, 34.39644051, 14.72847983, 100.47390909),
                (-0.00011607, -0.00013253, -0.00183714, 3034.74612775, 0.21252668, 0.20469106)),
    "Saturn": ((9.53667594, 0.05386179, 2.48599187, 49.95424423, 92.59887831, 113.66242448),
               (-0.00125060, -0.00050991, 0.00193609, 1222.49362201, -0.41897216, -0.28867794)),
    "Uranus": ((19.18916464, 0.04725744, 0.77263783, 313.23810451, 170.95427630, 74.01692503),
               (-0.00196176, -0.00004397, -0.00242939, 428.48202785, 0.40805281, 0.04240589)),
    "Neptune": ((30.06992276, 0.00859048, 1.77004347, -55.12002969, 44.96476227, 131.78422574),
                (0.00026291, 0.00005105, 0.00035372, 218.45945325, -0.32241464, -0.00508664)),
    "Pluto": ((39.48211675, 0.24882730, 17.14001206, 238.92903833, 224.06891629, 110.30393684),
              (-0.00031596, 0.00005170, 0.00004818, 145.20780515, -0.04062942, -0.01183482)),
}

# id, mu (km^3/s^2), mean radius (km), minimum flyby altitude (km)
PHYSICAL = {
    "Mercury": (1, 22032.0, 2440.0, 100.0),
    "Venus": (2, 324859.0, 6052.0, 200.0),
    "Earth": (3, 398600.4418, 6378.136, 200.0),
    "Mars": (4, 42828.0, 3397.0, 100.0),
    "Jupiter": (5, 126686534.0, 71492.0, 2000.0),
    "Saturn": (6, 37931187.0, 60330.0, 2000.0),
    "Uranus": (7, 5793939.0, 25362.0, 1000.0),
    "Neptune": (8, 6836529.0, 24622.0, 1000.0),
    "Pluto": (9, 869.6, 1188.3, 100.0),
}


def wrap(angle):
    return angle % (2.0 * math.pi)


def planet_entry(name):
    (a, e, inc, L, varpi, node), (da, de, dinc, dL, dvarpi, dnode) = JPL_TABLE1[name]
    pid, mu, radius, min_alt = PHYSICAL[name]
    a_km = a * AU
    n_kepler = math.sqrt(MU_SUN / a_km**3) * 86400.0  # rad/day
    return {
        "id": pid,
        "name": name,
        "mu_km3s2": mu,
        "radius_km": radius,
        "min_altitude_km": min_alt,
        "elements": {
            "a_km": a_km,
            "e": e,
            "i_rad": wrap(inc * DEG),
            "raan_rad": wrap(node * DEG),
            "argp_rad": wrap((varpi - node) * DEG),
            "M0_rad": wrap((L - varpi) * DEG),
            "epoch_mjd2000": J2000_MJD2000,
            "rates": {
                "a_km": da * AU / CENTURY,
                "e": de / CENTURY,
                "i_rad": dinc * DEG / CENTURY,
                "raan_rad": dnode * DEG / CENTURY,
                "argp_rad": (dvarpi - dnode) * DEG / CENTURY,
                # the table's mean longitude rate already contains the mean motion
                "M_rad": (dL - dvarpi) * DEG / CENTURY - n_kepler,
            },
        },
    }


def small_body(pid, name, mu, radius, epoch_mjd2000, a_au, e, i_deg, raan_deg, argp_deg, m_deg):
    return {
        "id": pid,
        "name": name,
        "mu_km3s2": mu,
        "radius_km": radius,
        "min_altitude_km": 0.0,
        "elements": {
            "a_km": a_au * AU,
            "e": e,
            "i_rad": i_deg * DEG,
            "raan_rad": raan_deg * DEG,
            "argp_rad": argp_deg * DEG,
            "M0_rad": wrap(m_deg * DEG),
            "epoch_mjd2000": epoch_mjd2000,
        },
    }


def main():
    bodies = [planet_entry(n) for n in PHYSICAL]
    # 67P: GTOP Rosetta data set, epoch MJD 52504.23754; mass ~1.0e13 kg.
    bodies.append(small_body(10, "67P", 6.66e-7, 2.0, 52504.23754 - 51544.0,
                             3.50294972836275, 0.6319356, 7.12723, 50.92302, 11.36788, 0.0))
    # NOTE 1989ML: the element service was unreachable when this file was built;
    # shape and orientation are the commonly quoted SBDB values, the mean anomaly
    # and epoch are unverified. Replace with a current SBDB record when possible.
    bodies.append(small_body(11, "1989ML", 1.5e-8, 0.3, 0.0,
                             1.2725, 0.1366, 4.378, 104.33, 183.37, 0.0))
    catalog = {"central_mu_km3s2": MU_SUN, "bodies": bodies}
    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "catalog.json"
    out.write_text(json.dumps(catalog, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {out} ({len(bodies)} bodies)")


if __name__ == "__main__":
    main()
