"""
Bit error rate under the attack battery
=======================================

The watermarked launchpad photo is attacked with JPEG at falling quality,
Gaussian and salt-and-pepper noise, median filtering and sharpening. Each
attacked copy is decoded blindly and scored against the embedded logo.

A 5x5 median scores far above 0.5: it returns most bits inverted. A
5-sample smoothing window has a negative response between about 0.2 and
0.4 cycles per pixel, which is where the mid band lives, so the carrier
survives with its sign flipped. A 5x5 box blur does the same.
"""

from jndmark import data
from jndmark.attacks import apply_attack, parse_attack
from jndmark.metrics import psnr
from jndmark.watermark import EmbedConfig, embed, extract

cover = data.photo("launchpad")
logo = data.watermark("lsu12x12")
cfg = EmbedConfig()
marked = embed(cover, logo, cfg)

battery = [
    "jpeg:q=75", "jpeg:q=45", "jpeg:q=40", "jpeg:q=35", "jpeg:q=30", "jpeg:q=20",
    "gauss:var=0.5%:seed=1", "gauss:var=2%:seed=1", "gauss:var=5%:seed=1",
    "saltpepper:d=0.02:seed=1", "saltpepper:d=0.05:seed=1",
    "median:w=3", "median:w=5",
    "sharpen:s=1.0", "sharpen:s=2.0",
]

print(f"{'attack':28s} {'PSNR':>8s} {'BER':>7s}")
for text in battery:
    spec, seed = parse_attack(text)
    attacked = apply_attack(marked, spec, seed).attacked
    ber = extract(attacked, (12, 12), cfg, reference=logo).ber
    print(f"{text:28s} {psnr(marked, attacked):8.2f} {ber:7.4f}")
