'''Minimal SVG charts for experiment reports.

Plots are advisory artifacts next to the canonical CSV/JSON outputs, so
the renderer is deliberately tiny: fixed-size canvas, log-log line
charts and normal QQ scatter, no styling knobs. Output is deterministic
for identical inputs.
'''

from __future__ import annotations

import math

import numpy as np
from scipy import stats

WIDTH = 560
HEIGHT = 400
MARGIN = 56
PALETTE = ('#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#8c564b')


def _fmt(v: float) -> str:
    return '%.2f' % v


class _Frame:
    '''Affine map from data coordinates to the SVG viewport.'''

    def __init__(self, xlo, xhi, ylo, yhi):
        if xhi <= xlo:
            xhi = xlo + 1.0
        if yhi <= ylo:
            yhi = ylo + 1.0
        self.xlo, self.xhi = xlo, xhi
        self.ylo, self.yhi = ylo, yhi

    def x(self, v):
        t = (v - self.xlo) / (self.xhi - self.xlo)
        return MARGIN + t * (WIDTH - 2 * MARGIN)

    def y(self, v):
        t = (v - self.ylo) / (self.yhi - self.ylo)
        return HEIGHT - MARGIN - t * (HEIGHT - 2 * MARGIN)


def _frame_elements(frame: _Frame, title, xlabel, ylabel, xticks, yticks,
                    tick_fmt):
    el = ['<rect x="%d" y="%d" width="%d" height="%d" fill="none" '
          'stroke="#333"/>' % (MARGIN, MARGIN, WIDTH - 2 * MARGIN,
                               HEIGHT - 2 * MARGIN)]
    el.append('<text x="%d" y="24" text-anchor="middle" '
              'font-size="14">%s</text>' % (WIDTH // 2, title))
    el.append('<text x="%d" y="%d" text-anchor="middle" font-size="12">%s'
              '</text>' % (WIDTH // 2, HEIGHT - 12, xlabel))
    el.append('<text x="16" y="%d" text-anchor="middle" font-size="12" '
              'transform="rotate(-90 16 %d)">%s</text>'
              % (HEIGHT // 2, HEIGHT // 2, ylabel))
    for tv in xticks:
        px = frame.x(tv)
        el.append('<line x1="%s" y1="%d" x2="%s" y2="%d" stroke="#999" '
                  'stroke-dasharray="2,3"/>'
                  % (_fmt(px), MARGIN, _fmt(px), HEIGHT - MARGIN))
        el.append('<text x="%s" y="%d" text-anchor="middle" font-size="10">'
                  '%s</text>' % (_fmt(px), HEIGHT - MARGIN + 16, tick_fmt(tv)))
    for tv in yticks:
        py = frame.y(tv)
        el.append('<line x1="%d" y1="%s" x2="%d" y2="%s" stroke="#999" '
                  'stroke-dasharray="2,3"/>'
                  % (MARGIN, _fmt(py), WIDTH - MARGIN, _fmt(py)))
        el.append('<text x="%d" y="%s" text-anchor="end" font-size="10">%s'
                  '</text>' % (MARGIN - 6, _fmt(py), tick_fmt(tv)))
    return el


def _write(path: str, elements) -> None:
    with open(path, 'w') as fh:
        fh.write('<svg xmlns="http://www.w3.org/2000/svg" width="%d" '
                 'height="%d">\n' % (WIDTH, HEIGHT))
        fh.write('<rect width="%d" height="%d" fill="white"/>\n'
                 % (WIDTH, HEIGHT))
        for el in elements:
            fh.write(el + '\n')
        fh.write('</svg>\n')


def _decade_ticks(lo: float, hi: float):
    first = math.ceil(lo - 1e-9)
    return [t for t in range(first, math.floor(hi + 1e-9) + 1)]


def log_log_plot(series, path: str, title: str = '', xlabel: str = 'level',
                 ylabel: str = 'value') -> None:
    '''Plot (label, xs, ys) series on log10-log10 axes with markers.'''
    all_x = np.concatenate([np.asarray(xs, dtype=float) for _, xs, _ in series])
    all_y = np.concatenate([np.asarray(ys, dtype=float) for _, _, ys in series])
    if np.any(all_x <= 0) or np.any(all_y <= 0):
        raise ValueError('log-log plot needs positive data')
    lx, ly = np.log10(all_x), np.log10(all_y)
    pad = 0.08
    frame = _Frame(lx.min() - pad, lx.max() + pad,
                   ly.min() - pad, ly.max() + pad)
    el = _frame_elements(frame, title, xlabel, ylabel,
                         _decade_ticks(frame.xlo, frame.xhi),
                         _decade_ticks(frame.ylo, frame.yhi),
                         lambda t: '1e%d' % t)
    for k, (label, xs, ys) in enumerate(series):
        color = PALETTE[k % len(PALETTE)]
        px = [frame.x(v) for v in np.log10(np.asarray(xs, dtype=float))]
        py = [frame.y(v) for v in np.log10(np.asarray(ys, dtype=float))]
        pts = ' '.join('%s,%s' % (_fmt(a), _fmt(b)) for a, b in zip(px, py))
        el.append('<polyline points="%s" fill="none" stroke="%s" '
                  'stroke-width="1.5"/>' % (pts, color))
        for a, b in zip(px, py):
            el.append('<circle cx="%s" cy="%s" r="3" fill="%s"/>'
                      % (_fmt(a), _fmt(b), color))
        el.append('<text x="%d" y="%d" font-size="11" fill="%s">%s</text>'
                  % (WIDTH - MARGIN - 150, MARGIN + 16 + 14 * k, color, label))
    _write(path, el)


def qq_plot(values, path: str, title: str = 'QQ vs normal') -> None:
    '''Standardized sample quantiles against normal quantiles.'''
    v = np.sort(np.asarray(values, dtype=float))
    sd = v.std(ddof=1)
    if sd == 0.0:
        raise ValueError('constant sample has no QQ plot')
    z = (v - v.mean()) / sd
    n = len(z)
    theo = stats.norm.ppf((np.arange(1, n + 1) - 0.5) / n)
    lo = float(min(theo.min(), z.min())) - 0.3
    hi = float(max(theo.max(), z.max())) + 0.3
    frame = _Frame(lo, hi, lo, hi)
    ticks = list(range(math.ceil(lo), math.floor(hi) + 1))
    el = _frame_elements(frame, title, 'normal quantile', 'sample quantile',
                         ticks, ticks, lambda t: str(t))
    el.append('<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="#d62728"/>'
              % (_fmt(frame.x(lo)), _fmt(frame.y(lo)),
                 _fmt(frame.x(hi)), _fmt(frame.y(hi))))
    for a, b in zip(theo, z):
        el.append('<circle cx="%s" cy="%s" r="2" fill="#1f77b4" '
                  'fill-opacity="0.7"/>' % (_fmt(frame.x(a)), _fmt(frame.y(b))))
    _write(path, el)
