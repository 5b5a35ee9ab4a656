from .fields import *
from .params import *
from .results import *
from .simulation import *
