# Copyright (c) 2025, Maverick Coref contributors
# For license information, please see license.txt
