from .autoencoder import Autoencoder
from .bof import BagOfFeatures
from .kmeans import KMeans

__all__ = ["Autoencoder", "BagOfFeatures", "KMeans"]
