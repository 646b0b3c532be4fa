"""
Embed, attack and blindly recover a watermark
=============================================

The 12x12 logo is hidden in the launchpad photo at beta 0.007 with the
d-sequence of the prime 2467, then read back without the original image,
first from the clean copy and then after JPEG compression at quality 40.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from jndmark import data
from jndmark.attacks import jpeg_attack
from jndmark.mask import mask_image
from jndmark.metrics import psnr, wpsnr
from jndmark.watermark import EmbedConfig, embed_detailed, extract

out = Path(__file__).with_name("output")
out.mkdir(exist_ok=True)

cover = data.photo("launchpad")
logo = data.watermark("lsu12x12")
cfg = EmbedConfig(beta=0.007, prime_q=2467)

# the mask is computed from the cover alone; every block carries one logo bit
result = embed_detailed(cover, logo, cfg)
marked = result.image
print(f"PSNR  {psnr(cover, marked):6.2f} dB")
print(f"WPSNR {wpsnr(cover, marked):6.2f} dB")

# blind extraction needs only the key and the logo size
clean = extract(marked, (12, 12), cfg, reference=logo)
print(f"clean BER      {clean.ber:.4f}")

attacked = jpeg_attack(marked, 40).attacked
after = extract(attacked, (12, 12), cfg, reference=logo)
print(f"JPEG q=40 BER  {after.ber:.4f}")

# a different prime sees only noise
wrong = extract(marked, (12, 12), EmbedConfig(prime_q=8069), reference=logo)
print(f"wrong key BER  {wrong.ber:.4f}")

fig, axes = plt.subplots(2, 3, figsize=(11, 7))
panels = [
    (cover, "cover"),
    (marked, "watermarked"),
    (mask_image(result.mask), "normalised JND mask"),
    (np.abs(marked.astype(int) - cover.astype(int)) * 16, "|difference| x 16"),
    (1 - clean.recovered, f"recovered, clean (BER {clean.ber:.3f})"),
    (1 - after.recovered, f"recovered, JPEG q=40 (BER {after.ber:.3f})"),
]
for ax, (img, title) in zip(axes.ravel(), panels):
    ax.imshow(img, cmap="gray", interpolation="nearest")
    ax.set_title(title)
    ax.axis("off")
fig.tight_layout()
fig.savefig(out / "embed_extract.png", dpi=100)
