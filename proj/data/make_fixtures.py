"""Regenerates the bundled fixtures (fixed seed, 17 significant digits)."""
import json
import pathlib

import numpy as np

here = pathlib.Path(__file__).parent
rng = np.random.default_rng(20240501)


def write_csv(path, c, header):
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for row in c:
            f.write(",".join(f"{v:.17g}" for v in row) + "\n")


def mat(m):
    return [[float(v) for v in row] for row in np.atleast_2d(m)]


# Zero noise, heteroscedastic per-row Sigma on J = {1, 2, 3}.
m, n, d = 50, 2, 1
x0 = np.array([[1.5], [-0.7]])
a0 = rng.normal(1.0, 1.0, size=(m, n))
c0 = np.hstack([a0, a0 @ x0])
write_csv(here / "zero_noise.csv", c0, ["a1", "a2", "b1"])
sigmas = []
for i in range(m):
    g = rng.normal(size=(3, 3))
    sigmas.append(mat(g @ g.T / 3 + 0.5 * np.eye(3)))
(here / "zero_noise_cov.json").write_text(json.dumps({"J": [1, 2, 3], "sigma_per_row": sigmas}, indent=1))
(here / "zero_noise_x0.json").write_text(json.dumps({"X0": mat(x0)}, indent=1))

# Homoscedastic: S_i = I on all columns, sigma = 0.05.
m, n, d = 200, 3, 2
x0 = rng.normal(size=(n, d))
a0 = rng.normal(size=(m, n))
c = np.hstack([a0, a0 @ x0]) + 0.05 * rng.normal(size=(m, n + d))
write_csv(here / "homoscedastic.csv", c, ["a1", "a2", "a3", "b1", "b2"])
(here / "homoscedastic_cov.json").write_text(
    json.dumps({"J": [1, 2, 3, 4, 5], "sigma_common": mat(np.eye(5))}, indent=1))
