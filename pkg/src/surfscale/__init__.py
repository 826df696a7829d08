'''surfscale: Poisson-Voronoi set estimators and surface-order scaling experiments.'''

__version__ = '0.1.0'
