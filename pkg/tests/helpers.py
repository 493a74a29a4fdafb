import numpy as np


def two_tone(f1=5.0, f2=50.0, fs=1000.0, n=4096):
    t = np.arange(n) / fs
    return np.sin(2 * np.pi * f1 * t) + np.sin(2 * np.pi * f2 * t), fs


def dominant_freq(x, fs):
    spec = np.abs(np.fft.rfft(x)) ** 2
    spec[0] = 0.0
    return np.fft.rfftfreq(len(x), 1.0 / fs)[np.argmax(spec)]


def zero_crossing_rate(x):
    s = np.signbit(x)
    return np.count_nonzero(s[1:] != s[:-1]) / len(x)
