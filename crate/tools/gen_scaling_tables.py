"""Regenerates the bundled scaling tables in crates/core/data/scaling.

Segment lengths (mm), mass percentages, CoM percentages and gyration radii
percentages are the adjusted segment parameters of de Leva (1996).
Length fractions are segment length divided by the reference stature.
CoM fractions are expressed from the segment's proximal joint in the
model tree, i.e. from the lower endpoint for pelvis, trunk parts and head.
"""
import os

STATURE = {"male": 1741.0, "female": 1735.0}
UPWARD = {"Head", "UpperTrunk", "MidTrunk", "Pelvis", "Trunk"}

# type: {gender: (length_mm, mass_pct, com_pct_from_reported_origin, r_sag, r_trans, r_long)}
DELEVA = {
    "Head":       {"male": (242.9, 6.94, 59.76, 36.2, 37.6, 31.2), "female": (243.7, 6.68, 58.94, 33.0, 35.9, 31.8)},
    "Trunk":      {"male": (603.3, 43.46, 44.86, 37.2, 34.7, 19.1), "female": (614.8, 42.57, 41.51, 35.7, 33.9, 17.1)},
    "UpperTrunk": {"male": (242.1, 15.96, 29.99, 71.6, 45.4, 65.9), "female": (228.0, 15.45, 20.77, 74.6, 50.2, 71.8)},
    "MidTrunk":   {"male": (215.5, 16.33, 45.02, 48.2, 38.3, 46.8), "female": (205.3, 14.65, 45.12, 43.3, 35.4, 41.5)},
    "Pelvis":     {"male": (145.7, 11.17, 61.15, 61.5, 55.1, 58.7), "female": (181.5, 12.47, 49.20, 43.3, 40.2, 44.4)},
    "UpperArm":   {"male": (281.7, 2.71, 57.72, 28.5, 26.9, 15.8), "female": (275.1, 2.55, 57.54, 27.8, 26.0, 14.8)},
    "LowerArm":   {"male": (268.9, 1.62, 45.74, 27.6, 26.5, 12.1), "female": (264.3, 1.38, 45.59, 26.1, 25.7, 9.4)},
    "Hand":       {"male": (86.2, 0.61, 79.00, 62.8, 51.3, 40.1), "female": (78.0, 0.56, 74.74, 53.1, 45.4, 33.5)},
    "Thigh":      {"male": (422.2, 14.16, 40.95, 32.9, 32.9, 14.9), "female": (368.5, 14.78, 36.12, 36.9, 36.4, 16.2)},
    "Shank":      {"male": (434.0, 4.33, 44.59, 25.5, 24.9, 10.3), "female": (432.3, 4.81, 44.16, 27.1, 26.7, 9.3)},
    "Foot":       {"male": (258.1, 1.37, 44.15, 25.7, 24.5, 12.4), "female": (228.3, 1.29, 40.14, 29.9, 27.9, 13.9)},
}
LIMBS = ["UpperArm", "LowerArm", "Hand", "Thigh", "Shank", "Foot"]

HEADER = "segment_type,gender,length_fraction,mass_fraction,com_fraction,rgyr_x,rgyr_y,rgyr_z"


def fmt(v):
    return repr(round(v, 6))


def rows(types, limb_multiplier=1.0):
    out = []
    for t in types:
        for g in ("male", "female"):
            length, mass, com, rs, rt, rl = DELEVA[t][g]
            com = com / 100.0
            if t in UPWARD:
                com = 1.0 - com
            m = mass / 100.0 * (limb_multiplier if t in LIMBS else 1.0)
            out.append(",".join([t, g, fmt(length / STATURE[g]), fmt(m), fmt(com),
                                  fmt(rs / 100), fmt(rt / 100), fmt(rl / 100)]))
    return out


def write(name, comment, body):
    path = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "data", "scaling", name)
    with open(path, "w") as f:
        for c in comment:
            f.write("% " + c + "\n")
        f.write(HEADER + "\n")
        for r in body:
            f.write(r + "\n")


SRC = "Adjusted de Leva (1996) segment parameters; limbs listed once per side."
write("deleva_3seg_torso.csv", [SRC, "Torso split into pelvis, mid trunk and upper trunk."],
      rows(["Head", "UpperTrunk", "MidTrunk", "Pelvis"] + LIMBS))
write("deleva_fused_torso.csv", [SRC, "Torso as a single trunk segment."],
      rows(["Head", "Trunk"] + LIMBS))
write("deleva_sagittal.csv", ["Adjusted de Leva (1996) segment parameters for planar models.",
                              "Limb masses combine left and right sides; gyration fractions are unchanged."],
      rows(["Head", "UpperTrunk", "MidTrunk", "Pelvis"] + LIMBS, limb_multiplier=2.0))

# Child table: mass fraction = a + b * age, with sum(a) = 1 and sum(b) = 0 so
# whole-body mass is preserved at every age. Gyration and CoM fractions reuse
# the male adult values.
JENSEN = {"Head": (0.20, -0.0065), "Trunk": (0.418, 0.0), "UpperArm": (0.024, 0.00025),
          "LowerArm": (0.016, 0.0), "Hand": (0.008, 0.0), "Thigh": (0.085, 0.0025),
          "Shank": (0.04, 0.0005), "Foot": (0.018, 0.0)}
with open(os.path.join(os.path.dirname(__file__), "..", "crates", "core", "data", "scaling", "jensen_child.csv"), "w") as f:
    f.write("% Child segment masses, linear in age (years): mass_fraction = a + b * age.\n")
    f.write("% Approximate coefficients; replace with a study-specific table where available.\n")
    f.write("segment_type,a,b,com_fraction,rgyr_x,rgyr_y,rgyr_z\n")
    for t, (a, b) in JENSEN.items():
        _, _, com, rs, rt, rl = DELEVA[t]["male"]
        com = com / 100.0
        if t in UPWARD:
            com = 1.0 - com
        f.write(",".join([t, fmt(a), fmt(b), fmt(com), fmt(rs / 100), fmt(rt / 100), fmt(rl / 100)]) + "\n")
