"""Datos de configuración empaquetados: valores por defecto y corpus."""
