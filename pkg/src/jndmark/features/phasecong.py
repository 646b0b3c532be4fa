"""Phase congruency via a bank of oriented log-Gabor filters.

Per orientation, phase congruency is the
noise-compensated local energy divided by the summed amplitude, weighted by
the spread of responses across scales. The per-orientation values are
combined through their moment covariance; the maximum moment marks edges.
Everything is dimensionless, so the maps do not change with image contrast.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft

EPS = 1e-4


@dataclass(frozen=True)
class PhaseCongruency:
    max_moment: np.ndarray
    min_moment: np.ndarray
    # unit edge normal in image coordinates (x to the right, y down)
    normal_x: np.ndarray
    normal_y: np.ndarray


def _filter_grids(rows: int, cols: int):
    fy = fft.fftfreq(rows)[:, None]
    fx = fft.fftfreq(cols)[None, :]
    radius = np.sqrt(fx**2 + fy**2)
    radius[0, 0] = 1.0
    # -fy so that angles increase anticlockwise on screen
    theta = np.arctan2(-fy, fx)
    return radius, np.sin(theta), np.cos(theta)


def phase_congruency(
    img,
    nscale: int = 4,
    norient: int = 6,
    min_wavelength: float = 3.0,
    mult: float = 2.1,
    sigma_onf: float = 0.55,
    k: float = 2.0,
    cutoff: float = 0.5,
    g: float = 10.0,
    pad: int = 48,
) -> PhaseCongruency:
    """Moments of phase congruency for a 2-D image.

    The image is mirror-padded by `pad` pixels on every side before the FFT so
    that the periodic wrap-around does not create spurious border features.
    """
    im = np.asarray(img, dtype=np.float64)
    h, w = im.shape
    if pad:
        im = np.pad(im, pad, mode="symmetric")
    rows, cols = im.shape
    spectrum = fft.fft2(im)

    radius, sintheta, costheta = _filter_grids(rows, cols)
    lowpass = 1.0 / (1.0 + (radius / 0.45) ** 30)
    log_gabor = []
    for s in range(nscale):
        fo = 1.0 / (min_wavelength * mult**s)
        lg = np.exp(-(np.log(radius / fo) ** 2) / (2 * np.log(sigma_onf) ** 2)) * lowpass
        lg[0, 0] = 0.0
        log_gabor.append(lg)

    covx2 = np.zeros_like(im)
    covy2 = np.zeros_like(im)
    covxy = np.zeros_like(im)
    energy_x = np.zeros_like(im)
    energy_y = np.zeros_like(im)
    # expected noise response of the whole scale sum relative to the finest scale
    tau_gain = (1 - (1 / mult) ** nscale) / (1 - 1 / mult)

    for o in range(norient):
        angle = o * np.pi / norient
        ds = sintheta * np.cos(angle) - costheta * np.sin(angle)
        dc = costheta * np.cos(angle) + sintheta * np.sin(angle)
        dtheta = np.minimum(np.abs(np.arctan2(ds, dc)) * norient / 2, np.pi)
        spread = (np.cos(dtheta) + 1) / 2

        responses = []
        sum_e = np.zeros_like(im)
        sum_o = np.zeros_like(im)
        sum_an = np.zeros_like(im)
        max_an = None
        tau = 0.0
        for s in range(nscale):
            eo = fft.ifft2(spectrum * log_gabor[s] * spread)
            an = np.abs(eo)
            responses.append(eo)
            sum_an += an
            sum_e += eo.real
            sum_o += eo.imag
            if s == 0:
                tau = np.median(sum_an) / np.sqrt(np.log(4))
                max_an = an
            else:
                max_an = np.maximum(max_an, an)

        energy_x += np.cos(angle) * sum_o
        energy_y += np.sin(angle) * sum_o

        x_energy = np.sqrt(sum_e**2 + sum_o**2) + EPS
        mean_e = sum_e / x_energy
        mean_o = sum_o / x_energy
        energy = np.zeros_like(im)
        for eo in responses:
            e, od = eo.real, eo.imag
            energy += e * mean_e + od * mean_o - np.abs(e * mean_o - od * mean_e)

        total_tau = tau * tau_gain
        noise_mean = total_tau * np.sqrt(np.pi / 2)
        noise_sigma = total_tau * np.sqrt((4 - np.pi) / 2)
        energy = np.maximum(energy - (noise_mean + k * noise_sigma), 0)

        width = (sum_an / (max_an + EPS) - 1) / (nscale - 1)
        weight = 1.0 / (1 + np.exp((cutoff - width) * g))
        pc = weight * energy / (sum_an + EPS)

        covx = pc * np.cos(angle)
        covy = pc * np.sin(angle)
        covx2 += covx**2
        covy2 += covy**2
        covxy += covx * covy

    covx2 /= norient / 2
    covy2 /= norient / 2
    covxy *= 4 / norient
    denom = np.sqrt(covxy**2 + (covx2 - covy2) ** 2) + EPS
    m_max = (covy2 + covx2 + denom) / 2
    m_min = (covy2 + covx2 - denom) / 2

    # odd-symmetric energy points across the feature; flip y for image rows
    norm = np.hypot(energy_x, energy_y)
    safe = np.where(norm > 0, norm, 1.0)
    nx = np.where(norm > 0, energy_x / safe, 1.0)
    ny = np.where(norm > 0, -energy_y / safe, 0.0)

    crop = (slice(pad, pad + h), slice(pad, pad + w)) if pad else (slice(None), slice(None))
    return PhaseCongruency(m_max[crop], m_min[crop], nx[crop], ny[crop])
