"""
JND mask along two block rows
=============================

The normalised mask value of every block in rows 32 and 50, for the smooth
and the busy photo. Busy texture lifts the mask; edges and corners pull it
down.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from jndmark import data
from jndmark.features import detect_corners, detect_edges
from jndmark.mask import compute_mask, dump_mask_rows

out = Path(__file__).with_name("output")
out.mkdir(exist_ok=True)

fig, axes = plt.subplots(1, 2, figsize=(11, 4), sharey=True)
for ax, row in zip(axes, (32, 50)):
    for name in ("launchpad", "gravel"):
        mask = compute_mask(data.photo(name))
        ax.plot(mask.normalized[row], label=name)
        dump_mask_rows(mask, [32, 50], out / f"mask_rows_{name}.csv")
    ax.set_title(f"block row {row}")
    ax.set_xlabel("block column")
    ax.legend()
axes[0].set_ylabel("normalised JND")
fig.tight_layout()
fig.savefig(out / "mask_rows.png", dpi=100)

# the edge and corner maps behind the launchpad mask
photo = data.photo("launchpad")
edges = detect_edges(photo)
corners = detect_corners(photo, edges)
print(f"{edges.sum()} edge pixels, {len(corners)} corners")
fig, ax = plt.subplots(figsize=(6, 6))
ax.imshow(edges, cmap="gray")
ax.plot(corners[:, 0], corners[:, 1], "r+", markersize=6)
ax.axis("off")
fig.tight_layout()
fig.savefig(out / "edges_corners.png", dpi=100)
