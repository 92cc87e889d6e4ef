#!/usr/bin/env python3
"""Regenerates the golden P5 frames and golden.txt from first principles.

Frames are synthetic bins: warm gaussian blobs on a cool background. The
expected numbers are computed here with brute-force Otsu, a BFS flood fill and
a direct pixel-difference count, independently of the C++ code.
"""
import math
import random
from collections import deque
from pathlib import Path

HERE = Path(__file__).parent
W, H = 96, 60
DELTA = 20
MIN_AREA = 25


def frame(blobs, noise_seed):
    rng = random.Random(noise_seed)
    img = []
    for r in range(H):
        row = []
        for c in range(W):
            v = 30.0
            for (br, bc, sigma, peak) in blobs:
                v += peak * math.exp(-((r - br) ** 2 + (c - bc) ** 2) / (2 * sigma * sigma))
            v += rng.uniform(-3, 3)
            row.append(max(0, min(255, int(round(v)))))
        img.append(row)
    return img


def write_pgm(path, img):
    data = bytes(v for row in img for v in row)
    path.write_bytes(b"P5\n%d %d\n255\n" % (W, H) + data)


def otsu(img):
    hist = [0] * 256
    for row in img:
        for v in row:
            hist[v] += 1
    n = sum(hist)
    best_t, best = 0, -1.0
    for t in range(256):
        n0 = sum(hist[: t + 1])
        n1 = n - n0
        if n0 == 0 or n1 == 0:
            continue
        mu0 = sum(i * hist[i] for i in range(t + 1)) / n0
        mu1 = sum(i * hist[i] for i in range(t + 1, 256)) / n1
        var = (n0 / n) * (n1 / n) * (mu0 - mu1) ** 2
        if var > best * (1 + 1e-12):
            best, best_t = var, t
    return best_t


def clusters(img, t):
    seen = [[False] * W for _ in range(H)]
    areas = []
    for r in range(H):
        for c in range(W):
            if img[r][c] <= t or seen[r][c]:
                continue
            q = deque([(r, c)])
            seen[r][c] = True
            area = 0
            while q:
                y, x = q.popleft()
                area += 1
                for dy in (-1, 0, 1):
                    for dx in (-1, 0, 1):
                        yy, xx = y + dy, x + dx
                        if 0 <= yy < H and 0 <= xx < W and not seen[yy][xx] and img[yy][xx] > t:
                            seen[yy][xx] = True
                            q.append((yy, xx))
            areas.append(area)
    kept = [a for a in areas if a >= MIN_AREA]
    return len(kept), sum(kept)


def changed(a, b):
    return sum(1 for r in range(H) for c in range(W) if abs(a[r][c] - b[r][c]) > DELTA)


CLUSTERED = [(15, 20, 6, 160), (40, 70, 8, 180), (45, 25, 5, 140), (12, 80, 4, 120)]
SPREAD = [(15, 24, 10, 90), (38, 64, 12, 100), (42, 30, 9, 80), (16, 76, 8, 70)]
MANUAL = [(30, 48, 30, 60)]

frames = {
    "clusters_before.pgm": frame(CLUSTERED, 1),
    "clusters_after_spindle.pgm": frame(SPREAD, 2),
    "clusters_after_manual.pgm": frame(MANUAL, 3),
}
for name, img in frames.items():
    write_pgm(HERE / name, img)

lines = [
    "# before after baseline|- threshold_before clusters_before growth_before mixed unmixed coverage efficacy|-",
    f"# mixed = |after - before| > {DELTA}; clusters keep areas >= {MIN_AREA}",
]
before = frames["clusters_before.pgm"]
t = otsu(before)
k, g = clusters(before, t)
for after_name, baseline_name in [
    ("clusters_after_spindle.pgm", "clusters_after_manual.pgm"),
    ("clusters_after_manual.pgm", "-"),
    ("clusters_before.pgm", "-"),
]:
    after = frames[after_name]
    m = changed(before, after)
    u = W * H - m
    eff = "-" if baseline_name == "-" else "%.6f" % (m / changed(before, frames[baseline_name]))
    lines.append(f"clusters_before.pgm {after_name} {baseline_name} {t} {k} {g} {m} {u} {m / (m + u):.6f} {eff}")
(HERE / "golden.txt").write_text("\n".join(lines) + "\n")
print("\n".join(lines))
