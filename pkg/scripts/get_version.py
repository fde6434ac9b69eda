#!/usr/bin/env python3
import sys
from os.path import dirname

sys.path.append(dirname(dirname(__file__)))

from coxperc import VERSION

sys.stdout.write(VERSION)
sys.stdout.flush()
