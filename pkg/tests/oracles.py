"""Frozen reference values.

Each constant was produced once by an independent high-precision or
brute-force computation (recipe in the comment) and is not recomputed
from package code.
"""

# mpmath, 40 digits: 0.5 * (|k-1|**2H - 2|k|**2H + |k+1|**2H) at H=0.9, k=1.
FGN_ACOV_H09_K1 = 0.7411011265922482782725400349594921979582
# Same recipe at H=0.1, k=1 (antipersistent, negative).
FGN_ACOV_H01_K1 = -0.4256508225014824966006865266110362052781

# mpmath, 40 digits, d=8.4, D=71.5, phi=15.7 deg, n=16, shaft 20 Hz.
BEARING_R = 0.1130994499298240798534736758337535542373
BEARING_20HZ = {
    "ftf": 8.869005500701759201465263241662464457627,
    "bpfo": 141.904088011228147223444211866599431322,
    "bpfi": 178.095911988771852776555788133400568678,
    "bsf": 84.03024854931945469002093035821562590627,
}


def envsi_brute_force(freqs, amplitudes, fault_freq, m1, m2, halfwidth, squared=False):
    """Loop-over-every-bin evaluation of the envelope-spectrum indicator."""
    ses = [float(a) ** 2 for a in amplitudes[:m2]]
    peak = 0.0
    for v in ses:
        if v > peak:
            peak = v
    if peak > 0:
        ses = [v / peak for v in ses]
    num = 0.0
    for i in range(1, m1 + 1):
        target = i * fault_freq
        best = None
        for j in range(m2):
            if abs(float(freqs[j]) - target) <= halfwidth:
                if best is None or ses[j] > best:
                    best = ses[j]
        if best is None:
            jn = min(range(m2), key=lambda j: abs(float(freqs[j]) - target))
            best = ses[jn]
        num += best * best if squared else best
    den = 0.0
    for v in ses:
        den += v
    return num / den if den > 0 else 0.0


def direct_convolve(x, h):
    """Textbook full-mode convolution by double summation."""
    out = [0.0] * (len(x) + len(h) - 1)
    for i, xi in enumerate(x):
        for j, hj in enumerate(h):
            out[i + j] += xi * hj
    return out
