from pathlib import Path
from typing import Optional, Union

import numpy as np

CANVAS: int = 600
MARGIN: int = 20
POINT_RADIUS: float = 1.6
DATA_COLOR: str = "#b0b0b0"
PALETTE: list[str] = [
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
    "#bcbd22",
    "#17becf",
]


def component_color(j: int) -> str:
    return PALETTE[j % len(PALETTE)]


def _viewport(points: np.ndarray) -> tuple[np.ndarray, float]:
    lo: np.ndarray = points.min(axis=0)
    hi: np.ndarray = points.max(axis=0)
    span: float = float(max(np.max(hi - lo), 1e-9))
    return lo, (CANVAS - 2 * MARGIN) / span


def _circles(points: np.ndarray, lo: np.ndarray, scale: float, color: str) -> list[str]:
    xs: np.ndarray = MARGIN + (points[:, 0] - lo[0]) * scale
    ys: np.ndarray = CANVAS - MARGIN - (points[:, 1] - lo[1]) * scale
    return [f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{POINT_RADIUS}" fill="{color}"/>' for x, y in zip(xs, ys)]


def render_scatter_svg(
    true_points: np.ndarray,
    samples: np.ndarray,
    components: np.ndarray,
    title: Optional[str] = None,
) -> str:
    """
    SVG 600 x 600: истинные данные серым, сэмплы раскрашены по компонентам.

    Используются только первые две координаты.

    Args:
        true_points: Истинные точки
        samples: Сэмплы смеси
        components: Номер компоненты каждого сэмпла
        title: Подпись в левом верхнем углу

    Returns:
        str: Текст SVG-документа
    """
    true_points = np.asarray(true_points, dtype=np.float64)[:, :2]
    samples = np.asarray(samples, dtype=np.float64)[:, :2]
    lo, scale = _viewport(np.vstack([true_points, samples]))

    parts: list[str] = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" viewBox="0 0 {CANVAS} {CANVAS}">',
        f'<rect width="{CANVAS}" height="{CANVAS}" fill="white"/>',
        '<g id="data">',
        *_circles(true_points, lo, scale, DATA_COLOR),
        "</g>",
    ]
    for j in np.unique(components):
        parts.append(f'<g id="component-{int(j)}">')
        parts.extend(_circles(samples[components == j], lo, scale, component_color(int(j))))
        parts.append("</g>")
    if title:
        parts.append(f'<text x="{MARGIN}" y="{MARGIN}" font-family="sans-serif" font-size="14">{title}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_scatter_svg(
    path: Union[str, Path],
    true_points: np.ndarray,
    samples: np.ndarray,
    components: np.ndarray,
    title: Optional[str] = None,
) -> Path:
    path = Path(path)
    path.write_text(render_scatter_svg(true_points, samples, components, title))
    return path
