#ifndef GAMMA_UTIL_H
#define GAMMA_UTIL_H

static double deg_to_rad(double degrees) {
    return degrees * 3.14159265358979 / 180.0;
}

#endif
