"""Named per-stage list limits and CRC layouts used in the reference experiments."""

LVECTOR_PRESETS = {
    # (2048, 1024), single CRC-16
    "L1": (22, 24, 26, 28, 30, 32, 32, 32, 32, 32, 32),
    "L2": (11, 12, 13, 14, 15, 16, 16, 16, 16, 16, 16),
    "L3": (5, 6, 7, 7, 7, 8, 8, 8, 8, 8, 8),
    # (2048, 1024), r = [2, 2, 2, 10]
    "L4": (8, 16) + (32,) * 9,
    "L5": (4, 8) + (16,) * 9,
    "L6": (2, 4) + (8,) * 9,
    # (16384, 8192), r = [10] * 8
    "L7": (1, 1, 1) + (32,) * 11,
    "L8": (1, 1, 1) + (16,) * 11,
    "L9": (1, 1, 1) + (8,) * 11,
}

RVECTOR_PRESETS = {
    "r2048": (2, 2, 2, 10),
    "r16384": (10,) * 8,
    "r2048_heavy": (10, 10, 10, 10),
}

# Desk-scale n=10 analogues: drop one full-width stage so the shape of the
# vector (ramp at the front, L at the back) is kept for a (1024, 512) code.
DESK_LVECTORS = {
    "L3_n10": (5, 6, 7, 7, 7, 8, 8, 8, 8, 8),
    "L6_n10": (2, 4) + (8,) * 8,
}
