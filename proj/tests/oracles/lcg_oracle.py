#!/usr/bin/env python3
"""Independent mapping oracle: services in name order, one LCG step each,
device = sorted(devices)[(state >> 32) % len(devices)]."""
import sys

M = 6364136223846793005
C = 1442695040888963407
MASK = (1 << 64) - 1


def assign(services, devices, seed):
    state = seed & MASK
    devices = sorted(devices)
    out = {}
    for s in sorted(services):
        state = (state * M + C) & MASK
        out[s] = devices[(state >> 32) % len(devices)]
    return out


def states(seed, n):
    state, out = seed & MASK, []
    for _ in range(n):
        state = (state * M + C) & MASK
        out.append(state)
    return out


if __name__ == "__main__":
    services, devices = ["A", "B"], ["D1", "D2", "D3"]
    for seed in [int(a) for a in sys.argv[1:]] or [0, 1, 2, 42]:
        print(seed, assign(services, devices, seed))
    print("states(0, 3):", [hex(s) for s in states(0, 3)])
