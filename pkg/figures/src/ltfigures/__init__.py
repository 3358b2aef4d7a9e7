from .render import FIGURES, FigureSpec, InputError, read_series, render, specs_for_dir

__version__ = "0.1.0"
